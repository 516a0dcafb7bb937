class DomainError(ValueError):
    """
    A parameter lies outside the domain where the
    attack circuit or the simulation is defined.
    """

    pass


class MalformedDataError(ValueError):
    def __init__(self, message, line_number=None):
        """
        Raised when an input data file does not follow its format

        :param message: what is wrong
        :param line_number: first offending line (1-based)
        :returns:
        :rtype:

        """

        self._line_number = line_number

        if line_number is not None:

            message = f"line {line_number}: {message}"

        super(MalformedDataError, self).__init__(message)

    @property
    def line_number(self):
        return self._line_number
