from .test_graph import *
from .test_net import *
