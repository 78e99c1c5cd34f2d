import math
from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

import specforge.global_config as gc
from specforge.utilities.errors import EmptyInput, PreconditionError, TooFewValues
from specforge.utilities.io.logger import MyLogger

descriptive_loc = 'descriptive_stats'

# Hyndman & Fan type 6: position p(n + 1), linear interpolation, clamped to the sample.
QUANTILE_METHOD = 'weibull'


def round_half_up(value, digits=0):
    """Rounds for display, halves away from zero.

    The value is first reduced to 12 significant digits so binary noise such
    as 0.58499999999999996 rounds like the decimal it stands for.
    """
    if value is None:
        return None
    exponent = Decimal(1).scaleb(-digits)
    rounded = Decimal(format(value, '.12g')).quantize(exponent, rounding=ROUND_HALF_UP)
    return int(rounded) if digits == 0 else float(rounded)


def format_value(value, digits=0):
    """Display string of a value at the given precision, '' when absent."""
    if value is None:
        return ''
    exponent = Decimal(1).scaleb(-digits)
    return str(Decimal(format(value, '.12g')).quantize(exponent, rounding=ROUND_HALF_UP))


def quantile(values, p):
    """Type 6 quantile of values."""
    return float(np.quantile(np.asarray(values, dtype=float), p, method=QUANTILE_METHOD))


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    median: float
    sample_std: object
    sample_variance: object
    min: float
    max: float
    range: float
    q1: float
    q3: float
    total: float

    @property
    def iqr(self):
        return self.q3 - self.q1

    def to_dict(self):
        return asdict(self)

    def display(self, digits=2, variance_digits=None):
        """All fields as strings at the printed precision."""
        variance_digits = digits + 2 if variance_digits is None else variance_digits
        shown = {name: format_value(value, digits) for name, value in self.to_dict().items() if name != 'n'}
        shown['sample_variance'] = format_value(self.sample_variance, variance_digits)
        shown['n'] = str(self.n)
        return shown


def describe(values):
    """Mean, median, sample variance/std, extremes and type 6 quartiles.

    Standard deviation and variance use the n - 1 denominator and are None
    for a single value. Sums are exact (``math.fsum``) so the result does not
    depend on the order of values.

    Raises:
        EmptyInput: for an empty list.
    """
    values = [float(v) for v in values]
    n = len(values)
    if n == 0:
        raise EmptyInput('Cannot describe an empty list of values')
    ordered = np.sort(np.asarray(values))
    total = math.fsum(values)
    mean = total / n
    variance = math.fsum((v - mean) ** 2 for v in values) / (n - 1) if n > 1 else None
    q1, q3 = np.quantile(ordered, [0.25, 0.75], method=QUANTILE_METHOD)
    return DescriptiveStats(
        n=n,
        mean=mean,
        median=float(np.median(ordered)),
        sample_std=math.sqrt(variance) if variance is not None else None,
        sample_variance=variance,
        min=float(ordered[0]),
        max=float(ordered[-1]),
        range=float(ordered[-1] - ordered[0]),
        q1=float(q1),
        q3=float(q3),
        total=total,
    )


def flag_outliers(values, policy):
    """Values flagged under a quartile policy, in input order.

    ``below_q1`` flags values strictly below Q1; ``tukey`` flags values
    outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR].

    Raises:
        TooFewValues: for fewer than 4 values.
    """
    values = list(values)
    if len(values) < 4:
        raise TooFewValues('Outlier screening needs at least 4 values, got {}'.format(len(values)))
    stats = describe(values)
    if policy == gc.below_q1:
        return [v for v in values if v < stats.q1]
    if policy == gc.tukey:
        low, high = stats.q1 - 1.5 * stats.iqr, stats.q3 + 1.5 * stats.iqr
        return [v for v in values if v < low or v > high]
    raise PreconditionError('Unknown outlier policy {!r}'.format(policy))


def iteration_outliers(scores, policy):
    """Ids of documents whose score is flagged within the pooled iteration.

    Args:
        scores (dict): Document id to recomputed DoR score.
        policy (str): below_q1 or tukey.
    """
    if len(scores) < 4:
        MyLogger.print_and_log('Only {} scores, skipping outlier screening'.format(len(scores)), descriptive_loc)
        return []
    flagged = set(flag_outliers(list(scores.values()), policy))
    return [doc_id for doc_id, score in scores.items() if score in flagged]
