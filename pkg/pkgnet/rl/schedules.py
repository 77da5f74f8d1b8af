from dataclasses import dataclass


@dataclass(frozen=True)
class LinearSchedule:
    """Linear interpolation from `start` to `end` over `duration` steps, then constant"""
    start: float
    end: float
    duration: int

    def value(self, step: int) -> float:
        if self.duration <= 0 or step >= self.duration:
            return self.end
        fraction = max(step, 0) / self.duration
        return self.start + fraction * (self.end - self.start)
