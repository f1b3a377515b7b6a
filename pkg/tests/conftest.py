import contextlib
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qhebb import qcore

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# --------------------------------------------------------------------------------------
# every QuantumChannel built during the run is checked for CPTP-ness


class ChannelLedger:
    def __init__(self):
        self.count = 0
        self.worst_eig = 0.0
        self.worst_tp = 0.0
        self.violations = []
        self.exempt = 0

    def record(self, ch):
        if self.exempt or ch.in_qubits != ch.out_qubits:
            return
        eig, tp = ch.min_choi_eigenvalue(), ch.tp_deviation()
        self.count += 1
        self.worst_eig = min(self.worst_eig, eig)
        self.worst_tp = max(self.worst_tp, tp)
        if eig < -qcore.CPTP_TOL or tp > qcore.CPTP_TOL:
            self.violations.append((ch.in_qubits, eig, tp))

    @contextlib.contextmanager
    def exempted(self):
        self.exempt += 1
        try:
            yield
        finally:
            self.exempt -= 1


CHANNELS = ChannelLedger()
_orig_post_init = qcore.QuantumChannel.__post_init__


def _recording_post_init(self):
    _orig_post_init(self)
    CHANNELS.record(self)


qcore.QuantumChannel.__post_init__ = _recording_post_init


@pytest.fixture
def channel_ledger():
    return CHANNELS


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --------------------------------------------------------------------------------------
# acceptance summary


ACCEPTANCE = {}
CRITERIA = {
    1: "decomposition correctness",
    2: "gate-count formula",
    3: "template counts",
    4: "single-step error exponent",
    5: "batch convergence exponent",
    6: "error-model optimum",
    7: "synthesis",
    8: "hebbian identity",
    9: "phase estimation",
    10: "resource scaling",
    11: "CPTP suite",
}


@pytest.fixture
def acceptance():
    def record(k, ok, detail=""):
        ACCEPTANCE[k] = (bool(ok), detail)
        print(f"criterion {k:2d} ({CRITERIA[k]}): {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if CHANNELS.count:
        terminalreporter.write_line(
            f"channels checked for CPTP: {CHANNELS.count}, worst min Choi eigenvalue {CHANNELS.worst_eig:.2e}, "
            f"worst TP deviation {CHANNELS.worst_tp:.2e}, violations {len(CHANNELS.violations)}")
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k, name in CRITERIA.items():
        ok, detail = ACCEPTANCE.get(k, (False, "not run"))
        terminalreporter.write_line(f"criterion {k:2d} ({name}): {'PASS' if ok else 'FAIL'}  {detail}")
