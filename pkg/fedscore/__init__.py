from .fedscore import FedScore
