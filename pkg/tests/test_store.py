import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commlens.errors import StorageError
from commlens.events import EventSnapshot, parse_utc
from commlens.store import EventStore
from helpers import ev, profile


def make_events(n, start_day=1):
    alice = profile("alice")
    return [
        ev("commit", alice, f"2023-01-{start_day + i:02d}T00:00:00Z", artifact=f"c{i}",
           event_id=f"e-{start_day + i:03d}")
        for i in range(n)
    ]


@pytest.fixture
def store(tmp_path):
    return EventStore(tmp_path / "store").initialize()


def test_append_fresh_events(store):
    assert store.append_events(make_events(10)) == 10


def test_append_is_idempotent(store):
    events = make_events(10)
    assert store.append_events(events) == 10
    assert store.append_events(events) == 0
    assert len(store.read_events()) == 10


def test_append_partial_overlap(store):
    events = make_events(10)
    store.append_events(events[:4])
    assert store.append_events(events) == 6


def test_double_append_byte_identical(store):
    events = make_events(5)
    store.append_events(events)
    once = store.log_path.read_bytes(), store.index_path.read_bytes()
    store.append_events(events)
    assert (store.log_path.read_bytes(), store.index_path.read_bytes()) == once


def test_append_requires_initialized_store(tmp_path):
    with pytest.raises(StorageError):
        EventStore(tmp_path / "missing").append_events(make_events(1))


def test_snapshot_filters_by_as_of(store):
    alice = profile("alice")
    for day in (1, 5, 9):
        store.append_events([ev("commit", alice, f"2023-01-{day:02d}T00:00:00Z",
                                event_id=f"d{day}")])
    snap = store.load_snapshot(as_of=parse_utc("2023-01-06T00:00:00Z"))
    assert len(snap) == 2
    assert snap.as_of == parse_utc("2023-01-06T00:00:00Z")


def test_snapshot_of_empty_store(store):
    snap = store.load_snapshot()
    assert len(snap) == 0


def test_snapshot_defaults_to_latest_timestamp(store):
    events = make_events(20)
    store.append_events(events)
    snap = store.load_snapshot()
    assert len(snap) == 20
    assert snap.as_of == max(e.timestamp for e in events)


def test_snapshot_sorted_by_timestamp_then_id(store):
    alice = profile("alice")
    batch = [
        ev("commit", alice, "2023-01-02T00:00:00Z", event_id="b"),
        ev("commit", alice, "2023-01-01T00:00:00Z", event_id="z"),
        ev("commit", alice, "2023-01-01T00:00:00Z", event_id="a"),
    ]
    store.append_events(batch)
    snap = store.load_snapshot()
    assert [e.event_id for e in snap] == ["a", "z", "b"]


def test_order_independent_snapshots(tmp_path):
    events = make_events(8)
    s1 = EventStore(tmp_path / "s1").initialize()
    s2 = EventStore(tmp_path / "s2").initialize()
    s1.append_events(events[:4])
    s1.append_events(events[4:])
    s2.append_events(events[4:])
    s2.append_events(events[:4])
    assert [e.event_id for e in s1.load_snapshot()] == [
        e.event_id for e in s2.load_snapshot()
    ]


@settings(max_examples=30, deadline=None)
@given(
    days=st.lists(st.integers(min_value=1, max_value=28), min_size=0, max_size=15),
    cut1=st.integers(min_value=1, max_value=28),
    cut2=st.integers(min_value=1, max_value=28),
)
def test_snapshot_monotonicity(days, cut1, cut2):
    alice = profile("alice")
    events = [
        ev("commit", alice, f"2023-03-{d:02d}T12:00:00Z", event_id=f"m{i}")
        for i, d in enumerate(days)
    ]
    t1 = parse_utc(f"2023-03-{min(cut1, cut2):02d}T12:00:00Z")
    t2 = parse_utc(f"2023-03-{max(cut1, cut2):02d}T12:00:00Z")
    early = {e.event_id for e in EventSnapshot.build(events, as_of=t1).events}
    late = {e.event_id for e in EventSnapshot.build(events, as_of=t2).events}
    assert early <= late
