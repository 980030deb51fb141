from focusplan.solver.baselines import baseline_avg, baseline_closest, baseline_focus, baseline_midrange
from focusplan.solver.common import InitPolicy, SolverConfig, Trace, TraceRow, plan_from_focus
from focusplan.solver.em import em_optimize, initial_plan, minimize_step, refocus_camera
from focusplan.solver.kview import StepResult, kview_optimize, kview_step
from focusplan.solver.partition import (BreakpointPartition, build_partition, camera_partition,
                                        optimal_focus_single)
from focusplan.solver.schedule import CameraTuple, independent_tuple_schedule, measure_overlap

__all__ = [
    "baseline_avg", "baseline_closest", "baseline_focus", "baseline_midrange",
    "InitPolicy", "SolverConfig", "Trace", "TraceRow", "plan_from_focus",
    "em_optimize", "initial_plan", "minimize_step", "refocus_camera",
    "StepResult", "kview_optimize", "kview_step",
    "BreakpointPartition", "build_partition", "camera_partition", "optimal_focus_single",
    "CameraTuple", "independent_tuple_schedule", "measure_overlap",
]
