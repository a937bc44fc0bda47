"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class CapacityError(RuntimeError):
    """A request exceeds a configured memory or size budget."""


class SearchExhausted(Exception):
    """A search ran out of budget without finding a result.

    Never a nonexistence claim, except within the explicit pool recorded
    in the diagnostics (``proven_absent_in_pool``).
    """

    def __init__(self, reason, *, pool_size=None, weight_total=None,
                 target=None, proven_absent_in_pool=False):
        super().__init__(reason)
        self.reason = reason
        self.pool_size = pool_size
        self.weight_total = weight_total
        self.target = target
        self.proven_absent_in_pool = proven_absent_in_pool


class MergeInsufficient(SearchExhausted):
    """Pigeonhole merge found no value 1/d occurring at least d times."""

    def __init__(self, value_counts):
        counts = {int(d): int(c) for d, c in sorted(value_counts.items())}
        super().__init__(f"no reciprocal value 1/d occurs d times: {counts}")
        self.value_counts = counts


class ObstructionError(DomainError):
    """A decomposition target fails the congruence feasibility gate."""

    def __init__(self, result):
        super().__init__(result.explanation)
        self.result = result
