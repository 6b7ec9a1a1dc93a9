"""
viability/cashflow.py
=====================

Discounting and internal rate of return.
--------------------------------------------------------------------------------

Cash flows are yearly, the first at t = 0 (construction cost, negative) and
the rest at t = 1, 2, ... (net benefits).
"""
import logging

import numpy as np
from scipy import optimize

IRR_BRACKET = (-0.99, 10.0)
IRR_XTOL = 1e-9


class IRRInputError(ValueError):
    pass


def _check_rate(rate):
    if not rate > -1.0:
        raise ValueError(f"discount rate must be > -1, got {rate}")


def npv(rate, cashflows):
    """Net present value of `cashflows` at `rate` per period.

    At rate 0 this is the plain sum of the flows, accumulated in order.
    """
    _check_rate(rate)
    flows = np.asarray(cashflows, dtype=float)
    discount = (1.0 + rate) ** -np.arange(flows.size, dtype=float)
    return float(sum(flows * discount))


def annuity_factor(rate, horizon):
    """Present value of 1 per year for years 1 .. horizon.

    Parameters
    ----------
    rate : float
        Discount rate per year, > -1.
    horizon : int
        Number of years, >= 1.
    """
    _check_rate(rate)
    if int(horizon) != horizon or horizon < 1:
        raise ValueError(f"horizon must be a positive integer, got {horizon}")
    if rate == 0:
        return float(horizon)
    return (1.0 - (1.0 + rate) ** -int(horizon)) / rate


def irr(cashflows, bracket=IRR_BRACKET, xtol=IRR_XTOL):
    """Internal rate of return by bisection on `bracket`.

    Parameters
    ----------
    cashflows : sequence of float
        At least two flows.

    Returns
    -------
    float or None
        None when the NPV does not change sign over the bracket.
    """
    flows = [float(cf) for cf in cashflows]
    if len(flows) < 2:
        raise IRRInputError(f"IRR needs at least 2 cash flows, got {len(flows)}")
    lo, hi = bracket

    def f(rate):
        return npv(rate, flows)

    with np.errstate(over="ignore"):
        f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if not np.sign(f_lo) * np.sign(f_hi) < 0:
        logging.debug("No IRR sign change on [%g, %g]", lo, hi)
        return None
    with np.errstate(over="ignore"):
        return float(optimize.bisect(f, lo, hi, xtol=xtol, maxiter=200))
