from .test_baselines import *
from .test_config import *
from .test_pipeline import *
from .test_report import *
