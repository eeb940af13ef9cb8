"""Shared pytest configuration.

Every test in test_acceptance.py reports one human-readable line so the
gate's verdict survives in plain log output even when pytest's own
formatting changes.
"""

ACCEPTANCE_LABELS = {
    "test_matrix_normalization": "matrix normalization",
    "test_formula_equivalence": "formula equivalence",
    "test_sampling_fidelity": "sampling fidelity",
    "test_non_overlap": "non-overlap",
    "test_transform_algebra": "transform algebra",
    "test_pitch_system": "pitch system",
    "test_envelope": "envelope",
    "test_manifold_determinism": "manifold determinism",
    "test_cli_contract": "CLI contract",
}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    label = ACCEPTANCE_LABELS.get(name, name)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {label}: {verdict}")
