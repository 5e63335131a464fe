import random
import threading

import pytest

from cooplocks import (
    AtomicCell,
    BackoffConfig,
    BackoffPolicy,
    KEEP_ACTIVE,
    READY_FOR_SUSPEND,
    LockNode,
    StrategyMask,
    join,
    resume_waiter,
    spawn,
    try_suspend,
    yield_now,
)

from conftest import run_coop


# -- config / mask -------------------------------------------------------

def test_backoff_config_validation():
    BackoffConfig(yield_limit=1, suspend_limit=1, spin_limit=1)
    with pytest.raises(ValueError):
        BackoffConfig(yield_limit=0)
    with pytest.raises(ValueError):
        BackoffConfig(yield_limit=9, suspend_limit=8)
    with pytest.raises(ValueError):
        BackoffConfig(spin_limit=0)


@pytest.mark.parametrize("code,flags", [
    ("SYS", (True, True, True)),
    ("SY*", (True, True, False)),
    ("S*S", (True, False, True)),
    ("*Y*", (False, True, False)),
    ("S**", (True, False, False)),
    ("*YS", (False, True, True)),
    ("**S", (False, False, True)),
])
def test_strategy_codes_round_trip(code, flags):
    mask = StrategyMask.parse(code)
    assert (mask.spin_enabled, mask.yield_enabled, mask.suspend_enabled) == flags
    assert mask.code == code


@pytest.mark.parametrize("bad", ["", "SY", "SYSS", "XYS", "S-S", "***", "YSY"])
def test_strategy_codes_rejected(bad):
    with pytest.raises(ValueError):
        StrategyMask.parse(bad)


def test_policy_requires_some_usable_stage():
    with pytest.raises(ValueError):
        BackoffPolicy(strategy=StrategyMask.parse("**S"), node=None)


# -- atomics -------------------------------------------------------------

def test_atomic_cell_cas_and_exchange():
    cell = AtomicCell(0)
    assert cell.compare_and_swap(0, 5)
    assert not cell.compare_and_swap(0, 7)
    assert cell.get() == 5
    assert cell.exchange(9) == 5
    assert cell.get() == 9


def test_atomic_cell_cas_is_atomic_across_threads():
    cell = AtomicCell(0)
    wins = []

    def claim(i):
        if cell.compare_and_swap(0, i):
            wins.append(i)

    threads = [threading.Thread(target=claim, args=(i,)) for i in range(1, 17)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(wins) == 1
    assert cell.get() == wins[0]


# -- ladder sequencing -----------------------------------------------------

def trace_of(strategy, config, calls, node=None):
    """Action log from running the policy inside a single-carrier runtime.

    The node's resume word is pre-set to KEEP_ACTIVE so suspend attempts
    log and return without parking.
    """
    trace = []

    def root():
        target = node
        if target is not None:
            target.resume_word.set(KEEP_ACTIVE)
        policy = BackoffPolicy(config, strategy, node=target, trace=trace)
        for _ in range(calls):
            policy.on_spin_wait()

    run_coop(root, carriers=1)
    return trace


def test_first_call_spins_two_noops():
    trace = trace_of(StrategyMask.parse("SYS"), BackoffConfig(), calls=1)
    assert trace == [("spin", 2)]


def test_spin_bursts_double_then_saturate():
    config = BackoffConfig(yield_limit=16, suspend_limit=16, spin_limit=64)
    trace = trace_of(StrategyMask.parse("SY*"), config, calls=10)
    assert [ops for kind, ops in trace] == [2, 4, 8, 16, 32, 64, 64, 64, 64, 64]


def test_yield_starts_at_yield_limit_without_node():
    config = BackoffConfig(yield_limit=3, suspend_limit=10)
    trace = trace_of(StrategyMask.parse("SYS"), config, calls=4)
    assert trace == [("spin", 2), ("spin", 4), ("yield",), ("yield",)]


def test_full_ladder_sequence_with_node():
    config = BackoffConfig(yield_limit=4, suspend_limit=6, spin_limit=1024)
    trace = trace_of(StrategyMask.parse("SYS"), config, calls=6, node=LockNode())
    assert trace == [
        ("spin", 2), ("spin", 4), ("spin", 8),
        ("yield",), ("yield",),
        ("suspend-attempt",),
    ]


def test_without_node_the_suspend_stage_keeps_yielding():
    config = BackoffConfig(yield_limit=2, suspend_limit=4)
    trace = trace_of(StrategyMask.parse("SYS"), config, calls=8)
    assert trace[0] == ("spin", 2)
    assert all(entry == ("yield",) for entry in trace[1:])


def test_disabled_spin_yields_from_the_start():
    config = BackoffConfig(yield_limit=4, suspend_limit=8)
    trace = trace_of(StrategyMask.parse("*Y*"), config, calls=10)
    assert all(entry == ("yield",) for entry in trace)


def test_disabled_yield_extends_spin_to_suspend_limit():
    config = BackoffConfig(yield_limit=2, suspend_limit=5, spin_limit=8)
    trace = trace_of(StrategyMask.parse("S*S"), config, calls=6, node=LockNode())
    kinds = [entry[0] for entry in trace]
    assert kinds == ["spin", "spin", "spin", "spin", "suspend-attempt", "suspend-attempt"]


def test_pure_spin_never_escalates():
    config = BackoffConfig(yield_limit=2, suspend_limit=3, spin_limit=16)
    trace = trace_of(StrategyMask.parse("S**"), config, calls=12, node=LockNode())
    assert all(entry[0] == "spin" for entry in trace)


def test_suspend_only_strategy_attempts_immediately():
    config = BackoffConfig(yield_limit=4, suspend_limit=8)
    trace = trace_of(StrategyMask.parse("**S"), config, calls=3, node=LockNode())
    assert all(entry == ("suspend-attempt",) for entry in trace)


STAGE_RANK = {"spin": 0, "yield": 1, "suspend-attempt": 2}


@pytest.mark.parametrize("code", ["SYS", "SY*", "S*S", "*Y*", "*YS"])
def test_escalation_is_monotone_for_random_configs(code):
    rng = random.Random(1234)
    for _ in range(20):
        yl = rng.randint(1, 12)
        sl = rng.randint(yl, 24)
        config = BackoffConfig(yield_limit=yl, suspend_limit=sl,
                               spin_limit=1 << rng.randint(0, 12))
        trace = trace_of(StrategyMask.parse(code), config, calls=sl + 5,
                         node=LockNode())
        ranks = [STAGE_RANK[entry[0]] for entry in trace]
        assert ranks == sorted(ranks), (code, config, trace)


def test_spin_burst_sizes_match_reference_everywhere():
    config = BackoffConfig(yield_limit=40, suspend_limit=40, spin_limit=1 << 9)
    trace = trace_of(StrategyMask.parse("S**"), config, calls=39)
    for iteration, (kind, ops) in enumerate(trace, start=1):
        assert kind == "spin"
        assert ops == min(2 ** iteration, config.spin_limit)


# -- suspend/resume handshake over a node ------------------------------------

def test_try_suspend_parks_until_resume_waiter():
    node = LockNode()
    events = []

    def sleeper():
        events.append("before")
        outcome = try_suspend(node)
        events.append(("woke", outcome))

    def waker():
        while node.resume_word.get() == READY_FOR_SUSPEND:
            yield_now()
        resume_waiter(node)

    def root():
        s = spawn(sleeper)
        w = spawn(waker)
        join(s)
        join(w)

    run_coop(root, carriers=1)
    assert events == ["before", ("woke", True)]
    assert node.resume_word.get() == KEEP_ACTIVE


def test_try_suspend_skips_when_keep_active_already_set():
    node = LockNode()
    node.resume_word.set(KEEP_ACTIVE)

    def root():
        assert try_suspend(node) is False

    _, rt = run_coop(root, carriers=1)
    assert rt._suspended == {}  # aborted handle retired


def test_resume_waiter_before_suspend_prevents_the_sleep():
    node = LockNode()

    def root():
        resume_waiter(node)  # waker passes first
        assert node.resume_word.get() == KEEP_ACTIVE
        assert try_suspend(node) is False  # waiter stays awake

    run_coop(root, carriers=1)


def test_double_resume_waiter_is_noop():
    node = LockNode()
    woken = []

    def sleeper():
        woken.append(try_suspend(node))

    def root():
        s = spawn(sleeper)
        while node.resume_word.get() == READY_FOR_SUSPEND:
            yield_now()
        resume_waiter(node)
        resume_waiter(node)  # second swap sees KEEP_ACTIVE: nothing to do
        join(s)

    run_coop(root, carriers=1)
    assert woken == [True]


def test_racing_suspend_and_resume_never_hang():
    # 100k suspend/resume races spread over pairs so the pools stay busy.
    pairs = 8
    rounds = 12_500
    guard = threading.Lock()
    outcomes = {"suspended": 0, "skipped": 0}

    def make_pair():
        ready = [None]

        def sleeper():
            suspended = skipped = 0
            for _ in range(rounds):
                node = LockNode()
                ready[0] = node
                if try_suspend(node):
                    suspended += 1
                else:
                    skipped += 1
                while ready[0] is not None:
                    yield_now()
            with guard:
                outcomes["suspended"] += suspended
                outcomes["skipped"] += skipped

        def waker():
            for _ in range(rounds):
                while ready[0] is None:
                    yield_now()
                resume_waiter(ready[0])
                ready[0] = None

        return sleeper, waker

    def root():
        tasks = []
        for _ in range(pairs):
            sleeper, waker = make_pair()
            tasks.append(spawn(sleeper))
            tasks.append(spawn(waker))
        for task in tasks:
            join(task)

    run_coop(root, carriers=2, timeout=240.0)
    assert outcomes["suspended"] + outcomes["skipped"] == pairs * rounds
