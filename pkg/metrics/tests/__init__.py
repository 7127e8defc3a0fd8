from .test_metrics import *
