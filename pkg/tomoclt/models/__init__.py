from tomoclt.models.geometry import Grid, LineCoord
from tomoclt.models.fields import CountField, StepField, TestFunction
from tomoclt.models.specs import (
    BerryEsseenReport,
    CorrectionSpec,
    ExperimentConfig,
    ExperimentResult,
    NormalizationMode,
)

__all__ = [
    'Grid', 'LineCoord', 'CountField', 'StepField', 'TestFunction',
    'BerryEsseenReport', 'CorrectionSpec', 'ExperimentConfig',
    'ExperimentResult', 'NormalizationMode',
]
