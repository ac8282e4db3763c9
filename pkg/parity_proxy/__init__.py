"""Parity detection by homodyne proxy for Gaussian interferometry."""

__version__ = "0.1.0"

from parity_proxy.circuit import (  # noqa: E402
    BeamSplitter,
    BogoliubovTransform,
    MultiModeMoments,
    PhaseShift,
    ProxyGeometry,
    TwoModeSqueezer,
    build_proxy_circuit,
    compose,
    propagate,
)
from parity_proxy.errors import (  # noqa: E402
    CutoffTooSmallError,
    ParityProxyError,
    UnphysicalMomentsError,
)
from parity_proxy.gaussian import GaussianMoments, parity_expectation  # noqa: E402
from parity_proxy.homodyne import (  # noqa: E402
    phase_sensitivity,
    proxy_reading,
    proxy_signal,
    signal_closed_form,
)

__all__ = [
    "BeamSplitter",
    "BogoliubovTransform",
    "CutoffTooSmallError",
    "GaussianMoments",
    "MultiModeMoments",
    "ParityProxyError",
    "PhaseShift",
    "ProxyGeometry",
    "TwoModeSqueezer",
    "UnphysicalMomentsError",
    "build_proxy_circuit",
    "compose",
    "parity_expectation",
    "phase_sensitivity",
    "propagate",
    "proxy_reading",
    "proxy_signal",
    "signal_closed_form",
]
