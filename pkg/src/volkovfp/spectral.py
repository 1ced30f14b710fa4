"""Frequency-content diagnostics of the projector kernel.

For a harmonic profile a2(s) = amplitude * cos(frequency * s) the phase
integral is elementary and the scalar kernel factor at s~ = 0 becomes a
discrete line spectrum

    e^{-i Phi(0,s)/4u} = sum_n c_n e^{-i (v0 + n frequency) s},

    v0  = (k2^2 + k3^2 + amplitude^2/2 + m^2) / (4u),
    c_n = sum_{n1 + 2 n2 = n} J_{n1}(z1) J_{n2}(z2),
    z1  = k2 * amplitude / (2 frequency u),
    z2  = amplitude^2 / (16 frequency u),

a double Jacobi-Anger resummation of the two sine harmonics appearing in
the phase (one at the wave frequency, one at twice it).  The c_n satisfy
sum |c_n|^2 = 1 since the resummed function has unit modulus.  At
amplitude 0 the spectrum collapses to the single dispersion line
4 u v = k2^2 + k3^2 + m^2.

``spectrum_fft`` recovers the same lines from uniform samples of the
scalar kernel factor: windowed FFT, 3-bin parabolic interpolation of the
log-magnitude around each peak (exact for Gaussian windows, whose
transform is a Gaussian), and amplitude read-off with the window's
coherent gain divided out.

``windowed_phase_transform`` evaluates the off-grid transform

    F(v) = int f(s) g(s) e^{-i Phi(0,s)/4u} e^{i v s} ds        (g = 1)

by Gauss-Legendre panels sized to the oscillation, for the one-sided
rapid-decay diagnostic: for u < 0 the phase derivative of the integrand
never vanishes once v > m^2/(8u), so F decays rapidly towards positive
v while Plancherel, int |F|^2 dv = 2 pi int |f g|^2 ds, rules out any
spurious global smallness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from .modes import ModeParams
from .potential import PlaneWavePotential, transverse_phase

__all__ = [
    "SpectrumLine",
    "GaussianWindow",
    "HannWindow",
    "window_from_descriptor",
    "UndersampledGridError",
    "harmonic_sidebands_analytic",
    "spectrum_fft",
    "windowed_phase_transform",
    "transform_l2",
    "plancherel_reference",
    "decay_order_fit",
    "tail_decay_orders",
    "write_lines_csv",
    "write_transform_csv",
]


class UndersampledGridError(ValueError):
    """Raised when an FFT grid cannot resolve the requested spectrum."""


@dataclass(frozen=True)
class SpectrumLine:
    """One spectral line: index n, frequency v_n, complex amplitude."""

    n: int
    v: float
    amplitude: complex


@dataclass(frozen=True)
class GaussianWindow:
    """exp(-(s-center)^2 / 2 width^2); effectively supported within 9 widths."""

    center: float
    width: float
    _CUT = 9.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("window width must be positive")

    def sample(self, s):
        s = np.asarray(s, dtype=float)
        return np.exp(-np.square(s - self.center) / (2.0 * self.width ** 2))

    def support(self) -> tuple[float, float]:
        return (self.center - self._CUT * self.width, self.center + self._CUT * self.width)

    def sq_integral(self) -> float:
        return self.width * np.sqrt(np.pi)

    def descriptor(self) -> dict:
        return {"kind": "gaussian", "center": self.center, "width": self.width}


@dataclass(frozen=True)
class HannWindow:
    """Raised cosine 0.5 (1 + cos(2 pi (s - mid)/span)) on [lo, hi], 0 outside."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("empty window support")

    def sample(self, s):
        s = np.asarray(s, dtype=float)
        mid = 0.5 * (self.lo + self.hi)
        span = self.hi - self.lo
        inside = np.abs(s - mid) <= 0.5 * span
        out = np.zeros_like(s)
        out[inside] = 0.5 * (1.0 + np.cos(2.0 * np.pi * (s[inside] - mid) / span))
        return out

    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def sq_integral(self) -> float:
        return 0.375 * (self.hi - self.lo)

    def descriptor(self) -> dict:
        return {"kind": "hann", "lo": self.lo, "hi": self.hi}


def window_from_descriptor(desc: dict):
    kind = desc.get("kind")
    if kind == "gaussian":
        return GaussianWindow(float(desc["center"]), float(desc["width"]))
    if kind == "hann":
        return HannWindow(float(desc["lo"]), float(desc["hi"]))
    raise ValueError(f"unknown window kind {kind!r}")


# ---------------------------------------------------------------------------
# analytic sidebands


def harmonic_carrier(mode: ModeParams, amplitude: float, frequency: float) -> float:
    """Carrier frequency (k2^2 + k3^2 + amplitude^2/2 + m^2) / 4u."""
    if frequency == 0:
        raise ValueError("harmonic frequency must be nonzero")
    return (mode.k2 ** 2 + mode.k3 ** 2 + 0.5 * amplitude ** 2 + mode.m ** 2) / (4.0 * mode.u)


def harmonic_sidebands_analytic(mode: ModeParams, amplitude: float, frequency: float,
                                n_max: int) -> list[SpectrumLine]:
    """Bessel-product sideband amplitudes c_n for |n| <= n_max.

    c_n = sum over n1 + 2 n2 = n of J_{n1}(z1) J_{n2}(z2); the two
    arguments come from the first and second harmonic of the phase.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if frequency == 0:
        raise ValueError("harmonic frequency must be nonzero")
    v0 = harmonic_carrier(mode, amplitude, frequency)
    z1 = mode.k2 * amplitude / (2.0 * frequency * mode.u)
    z2 = amplitude ** 2 / (16.0 * frequency * mode.u)

    n2_cap = n_max + 16
    n2_range = np.arange(-n2_cap, n2_cap + 1)
    j2 = jv(n2_range, z2)
    lines = []
    for n in range(-n_max, n_max + 1):
        n1_orders = n - 2 * n2_range
        c_n = complex(np.sum(jv(n1_orders, z1) * j2))
        lines.append(SpectrumLine(n=n, v=v0 + n * frequency, amplitude=c_n))
    return lines


# ---------------------------------------------------------------------------
# FFT spectra


def spectrum_fft(s_grid, values, window, base_frequency: float, carrier: float,
                 n_max: int) -> list[SpectrumLine]:
    """Extract lines at carrier + n * base_frequency from uniform samples.

    values are samples of a function sum_n c_n e^{-i v_n s}.  The grid
    must span at least 16 base periods and its Nyquist frequency must
    exceed the largest requested line.  Peak positions come from a 3-bin
    parabolic fit of log|FFT| (exact for Gaussian windows); amplitudes
    are the windowed projections at the refined positions, normalised by
    the window's coherent gain.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    values = np.asarray(values, dtype=complex)
    if s_grid.ndim != 1 or s_grid.shape != values.shape:
        raise ValueError("s_grid and values must be matching 1-d arrays")
    steps = np.diff(s_grid)
    ds = steps[0]
    if not np.allclose(steps, ds, rtol=1e-9, atol=0.0):
        raise ValueError("spectrum_fft needs a uniform s grid")
    if base_frequency == 0:
        raise ValueError("base frequency must be nonzero")
    span = s_grid[-1] - s_grid[0]
    period = 2.0 * np.pi / abs(base_frequency)
    if span < 16.0 * period:
        raise UndersampledGridError(
            f"grid spans {span / period:.1f} base periods, need at least 16"
        )
    nyquist = np.pi / ds
    v_extreme = abs(carrier) + n_max * abs(base_frequency)
    if nyquist <= 1.25 * v_extreme:
        raise UndersampledGridError(
            f"Nyquist {nyquist:.3g} too low for lines up to |v| = {v_extreme:.3g}"
        )

    n_samples = s_grid.shape[0]
    w = np.asarray(window.sample(s_grid), dtype=float)
    gain = float(np.sum(w))
    if gain <= 0:
        raise ValueError("window vanishes on the sampling grid")
    spectrum = np.fft.fft(values * w)
    mag = np.abs(spectrum)
    dv = 2.0 * np.pi / (n_samples * ds)

    lines = []
    for n in range(-n_max, n_max + 1):
        v_expect = carrier + n * base_frequency
        # component e^{-i v s} lands in bin k with 2 pi k / (N ds) = -v mod 2 pi/ds
        k_float = (-v_expect / dv) % n_samples
        k0 = int(np.round(k_float)) % n_samples
        half = max(2, int(0.35 * abs(base_frequency) / dv))
        offsets = np.arange(-half, half + 1)
        cand = (k0 + offsets) % n_samples
        k_peak = int(cand[np.argmax(mag[cand])])
        km = (k_peak - 1) % n_samples
        kp = (k_peak + 1) % n_samples
        with np.errstate(divide="ignore"):
            lm, lc, lp = np.log(mag[km]), np.log(mag[k_peak]), np.log(mag[kp])
        denom = lm - 2.0 * lc + lp
        delta = 0.5 * (lm - lp) / denom if np.isfinite(denom) and denom != 0 else 0.0
        delta = float(np.clip(delta, -0.5, 0.5))
        # unwrap the refined bin to the v-representative nearest v_expect
        k_ref = k_peak + delta
        v_raw = -k_ref * dv
        wrap = 2.0 * np.pi / ds
        v_hat = v_raw - wrap * np.round((v_raw - v_expect) / wrap)
        amp = complex(np.sum(values * w * np.exp(1j * v_hat * s_grid)) / gain)
        lines.append(SpectrumLine(n=n, v=float(v_hat), amplitude=amp))
    return lines


# ---------------------------------------------------------------------------
# windowed phase transform


def _gl_panels(lo: float, hi: float, max_width: float, order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    n_panels = max(1, int(np.ceil((hi - lo) / max_width)))
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    s = (mid[:, None] + half[:, None] * nodes[None, :]).reshape(-1)
    w = (half[:, None] * weights[None, :]).reshape(-1)
    return s, w


def windowed_phase_transform(mode: ModeParams, pot: PlaneWavePotential, window,
                             v_grid, *, gl_order: int = 32,
                             weight=None) -> np.ndarray:
    """F(v) = int f(s) g(s) e^{-i Phi(0,s)/4u} e^{i v s} ds on the given v grid.

    weight is the optional smooth scalar channel g(s) (default 1).  The
    quadrature uses Gauss-Legendre panels no wider than an eighth of the
    fastest oscillation among the phase factor and the largest |v|.
    """
    v_grid = np.atleast_1d(np.asarray(v_grid, dtype=float))
    lo, hi = window.support()
    probe = np.linspace(lo, hi, 128)
    q_max = float(np.max(
        (mode.k2 + np.asarray(pot.a2(probe))) ** 2
        + (mode.k3 + np.asarray(pot.a3(probe))) ** 2
    )) + mode.m ** 2
    phase_freq = q_max / (4.0 * abs(mode.u))
    v_max = float(np.max(np.abs(v_grid))) if v_grid.size else 1.0
    fastest = max(phase_freq, v_max, 1e-9)
    width = min((hi - lo) / 8.0, 2.0 * np.pi / (8.0 * fastest))
    s, w = _gl_panels(lo, hi, width, gl_order)

    zeta = transverse_phase(pot, mode.k2, mode.k3, 0.0, s) + mode.m ** 2 * s
    core = np.asarray(window.sample(s), dtype=complex) * np.exp(-1j * zeta / (4.0 * mode.u))
    if weight is not None:
        core = core * np.asarray(weight(s), dtype=complex)
    core = core * w

    out = np.empty(v_grid.shape, dtype=complex)
    chunk = max(1, int(2_000_000 // max(s.size, 1)))
    for start in range(0, v_grid.size, chunk):
        vs = v_grid[start:start + chunk]
        out[start:start + chunk] = np.exp(1j * np.outer(vs, s)) @ core
    return out


def transform_l2(v_grid, f_values) -> float:
    """Trapezoid integral of |F|^2 over the sampled v grid."""
    v_grid = np.asarray(v_grid, dtype=float)
    return float(np.trapezoid(np.abs(np.asarray(f_values)) ** 2, v_grid))


def plancherel_reference(window, weight_sq_integral: float | None = None) -> float:
    """2 pi int |f g|^2 ds for the pure window channel (g = 1)."""
    if weight_sq_integral is None:
        weight_sq_integral = window.sq_integral()
    return 2.0 * np.pi * weight_sq_integral


# ---------------------------------------------------------------------------
# decay-order fits


def decay_order_fit(x, magnitudes) -> tuple[float, float]:
    """Least-squares exponent N of a |x|^-N envelope, with fit residual.

    Fits log|value| against log|x|; N is minus the slope and the residual
    is the rms misfit.  Superpolynomial decay shows up as N growing with
    the upper end of the fit window.
    """
    x = np.asarray(x, dtype=float)
    magnitudes = np.asarray(magnitudes, dtype=float)
    if x.shape != magnitudes.shape or x.ndim != 1:
        raise ValueError("x and magnitudes must be matching 1-d arrays")
    if x.shape[0] < 8:
        raise ValueError("decay fit needs at least 8 samples")
    if np.any(magnitudes <= 0):
        raise ValueError("decay fit needs positive magnitudes")
    if np.any(x <= 0):
        raise ValueError("decay fit needs positive abscissae")
    lx = np.log(x)
    if np.ptp(lx) == 0:
        raise ValueError("degenerate fit window")
    ly = np.log(magnitudes)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return float(-slope), resid


def tail_decay_orders(mode: ModeParams, pot: PlaneWavePotential, window,
                      v_lo: float, v_hi: float, n_points: int = 25,
                      floor: float = 1e-300) -> dict:
    """Measured decay orders of |F(v)| on the +/- tails [v_lo, v_hi].

    Reports the fitted order on each side; the positive-v side is the
    asserted rapid-decay direction, the negative side is reported for
    comparison only (no rate is claimed for it).
    """
    if not (0 < v_lo < v_hi):
        raise ValueError("need 0 < v_lo < v_hi")
    v_plus = np.geomspace(v_lo, v_hi, n_points)
    f_plus = np.abs(windowed_phase_transform(mode, pot, window, v_plus))
    f_minus = np.abs(windowed_phase_transform(mode, pot, window, -v_plus))
    order_plus, resid_plus = decay_order_fit(v_plus, np.maximum(f_plus, floor))
    order_minus, resid_minus = decay_order_fit(v_plus, np.maximum(f_minus, floor))
    return {
        "v_lo": v_lo,
        "v_hi": v_hi,
        "order_positive": order_plus,
        "residual_positive": resid_plus,
        "order_negative": order_minus,
        "residual_negative": resid_minus,
        "asymmetry": order_plus - order_minus,
    }


# ---------------------------------------------------------------------------
# CSV export


def write_lines_csv(path, lines, comment: str | None = None) -> None:
    rows = []
    if comment:
        rows.append(f"# {comment}")
    rows.append("n,v_n,re_amp,im_amp,abs_amp")
    for line in lines:
        amp = complex(line.amplitude)
        rows.append(
            f"{line.n},{line.v:.17g},{amp.real:.17g},{amp.imag:.17g},{abs(amp):.17g}"
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(rows) + "\n")


def write_transform_csv(path, v_grid, f_values, comment: str | None = None) -> None:
    rows = []
    if comment:
        rows.append(f"# {comment}")
    rows.append("v,re_F,im_F")
    for v, f in zip(np.asarray(v_grid, dtype=float), np.asarray(f_values, dtype=complex)):
        rows.append(f"{v:.17g},{f.real:.17g},{f.imag:.17g}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(rows) + "\n")
