from .model import (
    RnnError,
    RnnParams,
    RnnSpec,
    forward,
    gru_cell_step,
    init_params,
    loss_and_gradients,
    lstm_cell_step,
    zero_params,
)
from .train import TrainedModel, load_checkpoint, save_checkpoint, train

__all__ = [
    "RnnError",
    "RnnParams",
    "RnnSpec",
    "TrainedModel",
    "forward",
    "gru_cell_step",
    "init_params",
    "load_checkpoint",
    "loss_and_gradients",
    "lstm_cell_step",
    "save_checkpoint",
    "train",
    "zero_params",
]
