"""Resource caps for the exact searches.

Every exhaustive path refuses to run past its cap instead of silently
truncating. ABMV_NODE_CAP in the environment overrides all defaults.
"""

import os

COMMITTEE_ENUMERATION_CAP = 10_000_000
PROFILE_CAP = 2_000_000
SUBSET_CAP = 2_000_000
IP_NODE_CAP = 500_000
GUESS_CAP = 2_000_000
MANIPULATOR_CAP = 3


def effective_cap(default: int) -> int:
    env = os.environ.get("ABMV_NODE_CAP")
    if env:
        return int(env)
    return default
