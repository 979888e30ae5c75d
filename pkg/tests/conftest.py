import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import make_table  # noqa: E402

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_PATH = Path(os.environ.get("ESNBENCH_DATA", REPO_ROOT / "data" / "parkinsons.data"))

requires_dataset = pytest.mark.skipif(
    not DATA_PATH.exists(),
    reason=f"UCI voice table not found at {DATA_PATH} "
           "(download it per README.md or set ESNBENCH_DATA)",
)


@pytest.fixture(scope="session")
def uci_table():
    if not DATA_PATH.exists():
        pytest.skip(f"UCI voice table not found at {DATA_PATH}")
    from esnbench.data import load_csv

    return load_csv(DATA_PATH)


@pytest.fixture(scope="session")
def synth_table():
    return make_table(seed=0)
