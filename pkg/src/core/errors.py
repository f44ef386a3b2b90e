class OrdinaliaError(Exception):
    pass


class OrdinalSyntaxError(OrdinaliaError):
    pass


class OrdinalOverflowError(OrdinaliaError):
    pass


class OrdinalRangeError(OrdinaliaError):
    pass


class WordError(OrdinaliaError):
    pass


class AlphabetMismatchError(OrdinaliaError):
    pass


class AutomatonError(OrdinaliaError):
    pass


class FormulaSyntaxError(OrdinaliaError):
    pass


class FormulaArityError(OrdinaliaError):
    pass


class ResourceLimitError(OrdinaliaError):
    pass


class ConcretizationError(OrdinaliaError):
    pass


class NormalizationError(OrdinaliaError):
    pass


class FileFormatError(OrdinaliaError):
    pass
