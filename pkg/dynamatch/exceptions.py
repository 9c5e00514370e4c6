class DynamatchError(Exception):
	"""Base class for every error raised by the lab."""

	title = "Dynamatch Error"


class ValidationError(DynamatchError):
	title = "Validation Error"


class SubsetEnumerationError(DynamatchError):
	title = "Subset Enumeration"


class EventBudgetExceeded(DynamatchError):
	title = "Event Budget"


class StepSizeUnderflow(DynamatchError):
	title = "Step Size Underflow"

	def __init__(self, message: str, t: float, h: float):
		super().__init__(message)
		self.t = t
		self.h = h

	def __reduce__(self):
		return self.__class__, (self.args[0], self.t, self.h)


class BracketingError(DynamatchError):
	title = "Bracketing Failure"

	def __init__(self, message: str, interval: tuple[float, float]):
		super().__init__(f"{message} (scanned interval [{interval[0]:.6g}, {interval[1]:.6g}])")
		self.reason = message
		self.interval = interval

	def __reduce__(self):
		return self.__class__, (self.reason, self.interval)


class CellError(DynamatchError):
	title = "Experiment Cell"

	def __init__(self, cell: tuple, cause: Exception):
		super().__init__(f"cell {cell} failed: {cause}")
		self.cell = cell
		self.cause = cause

	def __reduce__(self):
		return self.__class__, (self.cell, self.cause)
