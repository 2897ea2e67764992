"""dBm <-> linear mW conversions (used only at config/report boundaries)."""

import math


def dbm_to_mw(x_dbm: float) -> float:
    return 10.0 ** (x_dbm / 10.0)


def mw_to_dbm(x_mw: float) -> float:
    if x_mw <= 0:
        raise ValueError("power must be positive")
    return 10.0 * math.log10(x_mw)
