import os

import pytest

os.environ.setdefault("HF_HUB_DISABLE_XET", "1")

TABLE2_PREMISE = "A blond man is drinking from a public fountain."
TABLE2_HYPOTHESIS = "The man is drinking water."


@pytest.fixture(scope="session")
def oracle():
    from defnli_bridge import BridgeConfig, ModelOracle

    try:
        return ModelOracle(BridgeConfig())
    except Exception as exc:  # model hub unreachable and nothing cached
        pytest.skip(f"bridge models unavailable: {exc}")
