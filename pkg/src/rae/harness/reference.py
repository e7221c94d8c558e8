"""Published hardware numbers, carried into reports as annotation only."""

HARDWARE_TABLE = {
    "device": "ibmq_manila",
    "observable": "XX",
    "standard_sampling": {"rmse": 0.025, "sigma": 0.011, "bias": 0.022, "samples": 12875, "trials": 19},
    "rae": {"rmse": 0.0045, "sigma": 0.0043, "bias": 0.0012, "samples": 1000, "trials": 32},
}

ANSATZ_EXPECTATION = -0.2238
