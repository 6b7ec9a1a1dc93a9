"""
rcforecast
==========

Reference class forecasting for transport infrastructure projects.
--------------------------------------------------------------------------------

Historical cost overruns and traffic inaccuracies are summarized, turned into
reference classes, and used to uplift new estimates, to stress-test
cost-benefit appraisals, and to simulate how biased appraisals change which
projects get funded.
"""
__version__ = "1.0.0"

from . import data, forecast, refclass, simulation, viability, file
