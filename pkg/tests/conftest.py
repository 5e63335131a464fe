import threading

import pytest

from cooplocks import Runtime, RuntimeConfig


def run_coop(root, timeout=90.0, runtime=None, **config):
    """Run `root` inside a fresh runtime with a hard test deadline.

    The runtime is driven from a helper thread; if it fails to finish in
    `timeout` seconds the test fails instead of hanging the suite.
    """
    rt = runtime if runtime is not None else Runtime(RuntimeConfig(**config))
    outcome = {}

    def runner():
        try:
            outcome["value"] = rt.start(root)
        except BaseException as exc:  # noqa: BLE001 - forwarded to the test
            outcome["error"] = exc

    thread = threading.Thread(target=runner, daemon=True)
    thread.start()
    thread.join(timeout)
    if thread.is_alive():
        pytest.fail(f"cooperative run did not finish within {timeout}s")
    if "error" in outcome:
        raise outcome["error"]
    return outcome["value"], rt


@pytest.fixture
def coop():
    return run_coop
