"""Special functions, ODE integration, damped quadrature and stencils."""
from .bessel import (
    bessel_j0,
    bessel_j1,
    bessel_j1_prime,
    bessel_jy,
    bessel_y0,
    bessel_y1,
    bessel_y1_prime,
    hankel2_1,
    hankel2_1_prime,
)
from .grid import LAYOUTS, WaveGrid
from .ode import OdeResult, integrate_ode
from .quadrature import (
    damped_semiinfinite_quadrature,
    exponential_damping,
    extrapolated_damped_quadrature,
    gauss_kronrod_adaptive,
    richardson_to_zero,
)
from .specs import OdeSpec, QuadratureSpec, finite_complex
from .stencils import central_first, central_second, dalembert_interior, finite_diff_dalembert

__all__ = [
    "bessel_j0", "bessel_j1", "bessel_j1_prime", "bessel_jy", "bessel_y0", "bessel_y1",
    "bessel_y1_prime", "hankel2_1", "hankel2_1_prime",
    "LAYOUTS", "WaveGrid", "OdeResult", "integrate_ode",
    "damped_semiinfinite_quadrature", "exponential_damping", "extrapolated_damped_quadrature",
    "gauss_kronrod_adaptive", "richardson_to_zero",
    "OdeSpec", "QuadratureSpec", "finite_complex",
    "central_first", "central_second", "dalembert_interior", "finite_diff_dalembert",
]
