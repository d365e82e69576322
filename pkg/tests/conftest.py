import pytest

from qilidar import (
    DetectorParams,
    Regime,
    ScenarioParams,
    SourceKind,
    SourceParams,
    build_inspection_plan,
    llv_coefficients,
)

# Reference desk scenario used throughout: weak pair source, lossy detectors,
# diffuse unit reflector, 0.5 GHz pulse rate.
NBAR = 2.19e-2
ETA = 0.5
BG_S = 5.06e-2
BG_I = 4.49e-4
REP_RATE = 5e8
DISTANCES = (1.2, 3.0, 3.3, 6.0)


@pytest.fixture(scope="session")
def reference_scenario() -> ScenarioParams:
    return ScenarioParams(
        source=SourceParams(NBAR, SourceKind.TMSV),
        signal_detector=DetectorParams(ETA, BG_S),
        idler_detector=DetectorParams(ETA, BG_I),
        rep_rate_hz=REP_RATE,
        object_reflectivity=1.0,
        detector_area_m2=1.0,
    )


@pytest.fixture(scope="session")
def reference_probs(reference_scenario):
    """Click probabilities at the 3 m reference distance."""
    return reference_scenario.probabilities(3.0)


@pytest.fixture(scope="session")
def reference_coeffs(reference_probs):
    return llv_coefficients(reference_probs, Regime.QI)


@pytest.fixture(scope="session")
def reference_plan(reference_scenario):
    return build_inspection_plan(reference_scenario, DISTANCES)
