from app.models.noise import Exclusion, NoiseReport, NoiseSample
from app.models.schedule import BetaRamp, MonotoneSchedule, ScheduleSet
from app.models.state import PureState
from app.models.training import (
    GammaResult,
    GradientSet,
    LossReport,
    MonotoneResult,
    SizeLevel,
    TrainingResult,
)
from app.models.trajectory import Trajectory
