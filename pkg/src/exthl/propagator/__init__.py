"""Parameterized kernels, the integrated propagator, Klein-Gordon checks and
wave-packet propagation."""
from .io import KERNEL_COLUMNS, read_grid, write_grid, write_kernel_csv
from .kernels import (
    DEFAULT_DAMPING_LADDER,
    KernelComparison,
    KernelValue,
    SpacetimeSeparation,
    compose_slices,
    hankel_sigma_integral,
    kernel_closed_form,
    kernel_free,
    kernel_sigma_free,
    kernel_sigma_slice,
    lattice_kernel,
)
from .klein_gordon import (
    KGResidual,
    kernel_grid,
    kg_residual,
    lightcone_mask,
    off_shell_mismatch,
    plane_wave_grid,
    short_time_step,
)
from .wavepacket import (
    NormCalibration,
    PacketSpec,
    calibrate_norm,
    gaussian_packet_source,
    kg_charge_radial,
    norm_from_charges,
    propagate_wavepacket,
)

__all__ = [
    "KERNEL_COLUMNS", "read_grid", "write_grid", "write_kernel_csv",
    "DEFAULT_DAMPING_LADDER", "KernelComparison", "KernelValue", "SpacetimeSeparation",
    "compose_slices", "hankel_sigma_integral", "kernel_closed_form", "kernel_free",
    "kernel_sigma_free", "kernel_sigma_slice", "lattice_kernel",
    "KGResidual", "kernel_grid", "kg_residual", "lightcone_mask", "off_shell_mismatch", "plane_wave_grid",
    "short_time_step",
    "NormCalibration", "PacketSpec", "calibrate_norm", "gaussian_packet_source",
    "kg_charge_radial", "norm_from_charges", "propagate_wavepacket",
]
