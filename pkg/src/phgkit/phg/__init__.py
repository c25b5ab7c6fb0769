from .expansion import (CertificationError, Expansion, ExpansionTerm,
                        NotDivisibleError, divide_by_t, extract_expansion,
                        homogenize_polynomial, make_b, split_term)
from .extension import (EpsilonSchedule, ExpansionMismatchError,
                        ExtensionResult, TermNotSymbolError, build_extension,
                        correct_restriction, epsilon_schedule)
from .roundtrip import (roundtrip_expansion, roundtrip_extension,
                        verify_theorem2)
