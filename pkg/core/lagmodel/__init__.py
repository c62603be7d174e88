from core.lagmodel.holdout import (
    BlockScore,
    ConstantMeanBuilder,
    HoldoutReport,
    TransferBuilder,
    holdout_eval,
    longest_run,
)
from core.lagmodel.transfer import (
    LagScan,
    LagScanEntry,
    LagSpec,
    Prediction,
    TransferModel,
    TransferTerm,
    fit_transfer,
    lag_scan,
    predict,
    term_name,
)

__all__ = [
    "BlockScore",
    "ConstantMeanBuilder",
    "HoldoutReport",
    "LagScan",
    "LagScanEntry",
    "LagSpec",
    "Prediction",
    "TransferBuilder",
    "TransferModel",
    "TransferTerm",
    "fit_transfer",
    "holdout_eval",
    "lag_scan",
    "longest_run",
    "predict",
    "term_name",
]
