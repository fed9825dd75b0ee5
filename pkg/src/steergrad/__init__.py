"""Interactive 2-D classifier training steered by counterfactual-direction
annotations: a human marks arrows along which a labeled point should cross
the decision boundary, and a gradient penalty aligns the model's decision
surface with them."""

__version__ = "0.1.0"

from steergrad._kernels import BACKEND
from steergrad.data import Dataset, DatasetSpec, ProbabilityGrid, accuracy, evaluate_grid, generate
from steergrad.losses import (
    AdamState,
    DirectionAnnotation,
    LabeledExample,
    LossBreakdown,
    LossConfig,
    bce_loss,
    direction_loss,
    init_optimizer,
    optimizer_step,
    soft_sign,
    total_objective,
)
from steergrad.model import (
    ModelConfig,
    ModelParams,
    directional_derivative,
    forward,
    init_params,
    input_gradient,
    param_gradient_of_directional_derivative,
    param_gradient_of_forward,
    params_from_text,
    params_to_text,
    unit_direction,
)

__all__ = [
    "BACKEND",
    "__version__",
    "AdamState",
    "Dataset",
    "DatasetSpec",
    "DirectionAnnotation",
    "LabeledExample",
    "LossBreakdown",
    "LossConfig",
    "ModelConfig",
    "ModelParams",
    "ProbabilityGrid",
    "accuracy",
    "bce_loss",
    "direction_loss",
    "directional_derivative",
    "evaluate_grid",
    "forward",
    "generate",
    "init_optimizer",
    "init_params",
    "input_gradient",
    "optimizer_step",
    "param_gradient_of_directional_derivative",
    "param_gradient_of_forward",
    "params_from_text",
    "params_to_text",
    "soft_sign",
    "total_objective",
    "unit_direction",
]
