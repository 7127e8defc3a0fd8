from .test_schedule import *
from .test_solver import *
