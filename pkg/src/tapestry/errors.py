"""Exception types shared across the service.

Names mirror the error contracts of the public operations so call sites
and tests can match on exactly the failure they expect.
"""


class TapestryError(Exception):
    """Base class for every error raised by this package."""


# --- crypto ---------------------------------------------------------------

class InvalidSeed(TapestryError):
    """An explicit RNG seed was supplied with the wrong length."""


class InvalidScope(TapestryError):
    """A key-derivation scope is malformed (empty type, negative day)."""


class InvalidInput(TapestryError):
    """Malformed key/signature/argument lengths."""


class WrongKey(TapestryError):
    """Authenticated decryption failed: wrong key or tampered box."""


class Malformed(TapestryError):
    """A sealed box is structurally broken (bad nonce size, truncated)."""


# --- ledger ---------------------------------------------------------------

class DuplicateEntry(TapestryError):
    """An evidence id was already committed to the chain."""


class EmptyCommit(TapestryError):
    """commit() was called with no entries."""


class NotFound(TapestryError):
    """No ledger entry (or stored record) under the requested id."""


# --- data lake ------------------------------------------------------------

class RejectedUnauthenticated(TapestryError):
    """Submitted evidence failed its signature check at the lake."""


class AlreadyStored(TapestryError):
    """A record with the same evidence id is already in the lake."""


class Unauthorized(TapestryError):
    """A deletion request failed its proof-of-ownership check."""


# --- behaviour analysis ---------------------------------------------------

class InsufficientHistory(TapestryError):
    """Not enough activities/windows for the requested computation."""


class InvalidNorm(TapestryError):
    """A behaviour norm does not match the series it is applied to."""


class InsufficientDonor(TapestryError):
    """The donor feed is too short for the requested splice length."""


# --- visualization --------------------------------------------------------

class InvalidRange(TapestryError):
    """An empty or inverted time range was requested."""
