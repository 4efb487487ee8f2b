"""Integer factorization by simulated diffusion on weighted Cayley graphs."""

from ._core import (
    DiffusionError,
    cayley_vertices,
    exponent_bound,
    factor,
    factor_random,
    factorize,
    find_order,
    find_repetition,
    gcd,
    is_prime,
    main,
    mod_pow,
    order_bruteforce,
    p_success,
    power_table,
    required_steps,
    screen,
    spectral_probability,
    spectrum,
    success_rate,
    walk,
)

__version__ = "0.1.0"
