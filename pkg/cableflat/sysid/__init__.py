from .dataset import MocapDataset, preprocess, synthetic_dataset  # noqa
from .identify import HomotopySchedule, IdentificationConfig, ThetaVector, identify  # noqa
