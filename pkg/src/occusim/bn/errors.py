"""Exceptions raised by the Bayesian network layer."""


class BNError(ValueError):
    """Base class for every network, inference and learning error."""


class UnknownVariable(BNError):
    def __init__(self, name, context=""):
        self.name = name
        self.context = context
        msg = f"unknown variable {name!r}"
        super().__init__(f"{msg} ({context})" if context else msg)


class DuplicateVariable(BNError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"variable {name!r} declared more than once")


class InvalidDomain(BNError):
    def __init__(self, name, reason):
        self.name = name
        super().__init__(f"variable {name!r}: {reason}")


class MissingCpt(BNError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"variable {name!r} has no CPT")


class CycleDetected(BNError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("cycle detected: " + " -> ".join(self.cycle + self.cycle[:1]))


class IncompleteCpt(BNError):
    def __init__(self, child, missing):
        self.child = child
        self.missing = tuple(missing)
        super().__init__(f"CPT of {child!r} has no row for parent assignment {self.missing}")


class MalformedRow(BNError):
    def __init__(self, child, row, reason):
        self.child = child
        self.row = tuple(row)
        super().__init__(f"CPT of {child!r}, row {self.row}: {reason}")


class RowNotNormalized(BNError):
    def __init__(self, child, row, total):
        self.child = child
        self.row = tuple(row)
        self.total = total
        super().__init__(f"CPT of {child!r}, row {self.row} sums to {total:.12g}")


class InvalidNetwork(BNError):
    """Aggregate of every violation found by ``validate_network``."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "\n".join(f"  - {e}" for e in self.errors)
        super().__init__(f"{len(self.errors)} network violation(s):\n{lines}")


class NoInterSliceEdge(BNError):
    def __init__(self):
        super().__init__("two-slice network has no 'previous:' edge; the model is static")


class InvalidEvidence(BNError):
    def __init__(self, name, label):
        self.name = name
        self.label = label
        super().__init__(f"label {label!r} is not in the domain of {name!r}")


class PartialAssignment(BNError):
    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__(f"assignment is missing {self.missing}")


class QueryEvidenceOverlap(BNError):
    def __init__(self, names):
        self.names = tuple(names)
        super().__init__(f"variables both queried and observed: {self.names}")


class ZeroProbabilityEvidence(BNError):
    def __init__(self, evidence):
        self.evidence = dict(evidence)
        super().__init__(f"evidence has probability zero: {self.evidence}")


class RejectionCapExceeded(BNError):
    def __init__(self, attempts):
        self.attempts = attempts
        super().__init__(f"no sample consistent with evidence after {attempts} attempts")


class BeliefMismatch(BNError):
    def __init__(self, expected, got):
        self.expected = tuple(expected)
        self.got = tuple(got)
        super().__init__(f"belief must be over {self.expected}, got {self.got}")


class LabelOutOfDomain(BNError):
    def __init__(self, record, name, label):
        self.record = record
        self.name = name
        self.label = label
        super().__init__(f"record {record}: label {label!r} not in domain of {name!r}")
