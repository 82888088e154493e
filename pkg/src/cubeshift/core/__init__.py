"""Exact input model and the form/window/box vocabulary shared by all modules."""

from .errors import (
    BudgetExceededError,
    CubeshiftError,
    DimensionError,
    ParseError,
    QuadratureError,
    SingularError,
    UndecidableError,
)
from .exact import ExactReal, continued_fraction
from .forms import (
    CubicPolynomial,
    CubicSystem,
    Enclosure,
    Form,
    SearchBox,
    ShiftedCubeForm,
    Window,
    eval_form,
    eval_system,
    in_window,
    load_form,
)
from .reals import (
    DecimalSpec,
    RationalSpec,
    RealSpec,
    SurdSpec,
    parse_exact,
    parse_real,
    spec_from_exact,
    surd_reduced_mod_one,
)

__all__ = [
    "BudgetExceededError",
    "CubeshiftError",
    "CubicPolynomial",
    "CubicSystem",
    "DecimalSpec",
    "DimensionError",
    "Enclosure",
    "ExactReal",
    "Form",
    "ParseError",
    "QuadratureError",
    "RationalSpec",
    "RealSpec",
    "SearchBox",
    "ShiftedCubeForm",
    "SingularError",
    "SurdSpec",
    "UndecidableError",
    "Window",
    "continued_fraction",
    "eval_form",
    "eval_system",
    "in_window",
    "load_form",
    "parse_exact",
    "parse_real",
    "spec_from_exact",
    "surd_reduced_mod_one",
]
