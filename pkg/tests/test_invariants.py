from global_shuffle.invariants import CHECKS, Task, acceptance_tasks, ring_model, run_tasks, selftest_tasks


def test_crashing_check_is_a_failure():
    res = Task.of("derived_kernel", genus=0, theory="additive", parts="1,x").run()
    assert not res.ok and res.line().startswith("FAIL derived_kernel(")


def test_run_tasks_keeps_order():
    tasks = [Task.of("grr_chain", n=n, d=2, g=1) for n in (3, 1, 2)]
    serial = run_tasks(tasks, jobs=1)
    parallel = run_tasks(tasks, jobs=2)
    assert serial == parallel
    assert [r.name for r in serial] == [f"grr_chain(d=2, g=1, n={n})" for n in (3, 1, 2)]


def test_task_lists_are_deterministic():
    assert selftest_tasks(3) == selftest_tasks(3)
    assert acceptance_tasks(6, 1) == acceptance_tasks(6, 1)
    assert {t.check for t in selftest_tasks()} == set(CHECKS)


def test_ring_model_exhaustive_small():
    assert ring_model(2, 2) == (True, "")
