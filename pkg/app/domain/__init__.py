from .schemas import ExperimentConfig
