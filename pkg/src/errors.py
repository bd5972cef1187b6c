"""Foutklassen voor catlab.

Alle fouten erven van ValueError, net als de rest van de code die
ongeldige invoer met een ValueError afwijst. Zo kan een aanroeper
volstaan met `except ValueError` en toch specifiek vangen waar nodig.
"""


class CatlabError(ValueError):
    """Basisklasse voor alle catlab fouten."""


class DimensionError(CatlabError):
    """Dimensies van toestanden of registers passen niet bij elkaar."""


class StateValidationError(CatlabError):
    """Matrix of vector is geen geldige quantumtoestand."""


class SupportError(CatlabError):
    """Support van rho valt buiten die van tau: oneindige max-relatieve entropie."""


class BranchOverflowError(CatlabError):
    """Te veel takken in de symbolische mixture (verklein n of het aantal rondes)."""


class NoCatalyticGainError(CatlabError):
    """De katalysator helpt nooit: F(tau) <= F(rho)."""


class ConfigError(CatlabError):
    """Ongeldige sweep- of CLI-configuratie."""
