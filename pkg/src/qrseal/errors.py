"""Exception hierarchy shared by the codec, cipher and document layers."""


class QrSealError(Exception):
    """Base class for every error raised by this package."""


class CapacityError(QrSealError, ValueError):
    """Payload does not fit in the selected QR profile."""


class UnrecoverableBlockError(QrSealError):
    """A Reed-Solomon block carries more errors than the code can fix."""


class FormatInfoError(QrSealError):
    """Format information is too damaged to identify level and mask."""


class UnsupportedVersionError(QrSealError, ValueError):
    pass


class BitmapError(QrSealError, ValueError):
    """An image could not be turned back into a module grid."""


class RecordFormatError(QrSealError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UndecodableError(QrSealError):
    """Sealed QR codes could not be turned back into a record.

    ``stage`` names the step that failed (``qr``, ``payload``, ``parts``,
    ``decrypt`` or ``record``).
    """

    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"{stage}: {message}")
