import json

import pytest

from sweep_state import append_checkpoint, get_state, load_checkpoint, record_key
from task_queue import TaskQueue, TaskStatus


@pytest.mark.parametrize("workers", [1, 2])
def test_map_ordered_keeps_submission_order(workers):
    args = [(n, 3, 1009) for n in range(40)]
    with TaskQueue(max_workers=workers) as queue:
        assert list(queue.map_ordered(pow, args)) == [pow(*a) for a in args]
        status = queue.get_queue_status()
    assert status["total_tasks"] == 40
    assert status["completed"] == 40
    assert status["workers"] == workers


def test_failed_task_is_recorded():
    queue = TaskQueue()
    with pytest.raises(ZeroDivisionError):
        list(queue.map_ordered(divmod, [(7, 2), (1, 0)]))
    tasks = queue.get_all_tasks()
    assert [t["status"] for t in tasks] == ["completed", "failed"]
    assert tasks[1]["func_name"] == "divmod"
    assert tasks[1]["error"]
    assert queue.get_task(tasks[1]["task_id"]).status is TaskStatus.FAILED
    assert queue.get_queue_status()["failed"] == 1


def test_failed_task_in_pool():
    with TaskQueue(max_workers=2) as queue:
        with pytest.raises(ZeroDivisionError):
            list(queue.map_ordered(divmod, [(1, 0), (4, 2)]))
        assert queue.get_queue_status()["failed"] == 1


def test_queue_needs_a_worker():
    with pytest.raises(ValueError):
        TaskQueue(max_workers=0)


def test_unknown_task():
    assert TaskQueue().get_task("missing") is None


# -----------------------------------------------------------------------------
# Checkpoint records
# -----------------------------------------------------------------------------
def test_record_key():
    assert record_key(13, "pm2") == "pm2:13"


def test_checkpoint_round_trip(tmp_path):
    path = tmp_path / "state" / "sweep.jsonl"
    assert load_checkpoint(path) == {}
    append_checkpoint(path, [
        {"p": 7, "test": "pm2", "verdict": "consistent", "payload": {}},
        {"p": 5, "test": "pm2", "verdict": "consistent", "payload": {}},
    ])
    append_checkpoint(path, [])
    lines = path.read_text().splitlines()
    assert [json.loads(line)["p"] for line in lines] == [5, 7]
    assert set(load_checkpoint(path)) == {"pm2:5", "pm2:7"}
    assert get_state(path, 7, "pm2")["verdict"] == "consistent"
    assert get_state(path, 11, "pm2") is None


def test_torn_line_is_skipped(tmp_path, caplog):
    path = tmp_path / "sweep.jsonl"
    append_checkpoint(path, [{"p": 5, "test": "a113305", "verdict": "member", "payload": {}}])
    with open(path, "a", encoding="utf-8") as f:
        f.write('{"p": 7, "test": "a11')
    assert set(load_checkpoint(path)) == {"a113305:5"}
    assert "skipping unreadable checkpoint line" in caplog.text
    append_checkpoint(path, [{"p": 7, "test": "a113305", "verdict": "non_member", "payload": {}}])
    assert get_state(path, 7, "a113305")["verdict"] == "non_member"


def test_later_records_win(tmp_path):
    path = tmp_path / "sweep.jsonl"
    append_checkpoint(path, [{"p": 5, "test": "pm2", "verdict": "FAIL", "payload": {}}])
    append_checkpoint(path, [{"p": 5, "test": "pm2", "verdict": "consistent", "payload": {}}])
    assert get_state(path, 5, "pm2")["verdict"] == "consistent"
