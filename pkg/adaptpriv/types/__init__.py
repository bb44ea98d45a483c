# coding=utf-8

from adaptpriv.types.distributions import Alphabet
from adaptpriv.types.distributions import Pmf
from adaptpriv.types.distributions import Joint3
from adaptpriv.types.distributions import Channel
from adaptpriv.types.distributions import DistortionMatrix
from adaptpriv.types.solver import EnumProblem
from adaptpriv.types.solver import EnumInitMode
from adaptpriv.types.solver import LagrangePair
from adaptpriv.types.solver import BaOptions
from adaptpriv.types.solver import MiOptions
from adaptpriv.types.solver import AuxDists
from adaptpriv.types.solver import Achieved
from adaptpriv.types.solver import BaResult
from adaptpriv.types.solver import BaState
from adaptpriv.types.curves import EnumSpacing
from adaptpriv.types.curves import EnumProvenance
from adaptpriv.types.curves import MultiplierGrid
from adaptpriv.types.curves import CurvePoint
from adaptpriv.types.releases import EnumSolvePath
from adaptpriv.types.releases import Budget
from adaptpriv.types.releases import SolveReport
from adaptpriv.types.releases import RequestSpec
from adaptpriv.types.releases import ReleaseRecord
from adaptpriv.types.releases import SessionState
