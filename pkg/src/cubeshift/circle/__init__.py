"""Circle-method objects: kernels, exponential sums, arcs and integrals."""

from .arcs import (MAJOR, MINOR, TRIVIAL, ArcParams, ClassicalMembership, RationalApprox,
                   classify_arc, classify_classical, convergents, dirichlet_approx)
from .integrals import (DirichletVolume, QuadResult, RepresentationIntegral, dirichlet_volume,
                        representation_integral, singular_integral, weighted_count)
from .kernels import (KERNELS, FourierValue, KernelParams, U, fourier_closed_form, kernel_fourier,
                      kernel_K, kernel_K1, kernel_K2pm, kernel_K_double, kernel_Kpm, sinc)
from .sums import (complete_exp_sum, differenced_aggregate, differenced_weyl_sum, phase_sum,
                   weyl_sum)

__all__ = [
    "ArcParams",
    "ClassicalMembership",
    "DirichletVolume",
    "FourierValue",
    "KERNELS",
    "KernelParams",
    "MAJOR",
    "MINOR",
    "QuadResult",
    "RationalApprox",
    "RepresentationIntegral",
    "TRIVIAL",
    "U",
    "classify_arc",
    "classify_classical",
    "complete_exp_sum",
    "convergents",
    "differenced_aggregate",
    "differenced_weyl_sum",
    "dirichlet_approx",
    "dirichlet_volume",
    "fourier_closed_form",
    "kernel_K",
    "kernel_K1",
    "kernel_K2pm",
    "kernel_K_double",
    "kernel_Kpm",
    "kernel_fourier",
    "phase_sum",
    "representation_integral",
    "sinc",
    "singular_integral",
    "weighted_count",
    "weyl_sum",
]
