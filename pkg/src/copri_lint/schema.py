"""Vocabulary of the privacy requirements model and its relation signatures.

Every relationship the model can hold is described by a property with a
domain and a range, expressed as sets of node kinds.  Node kinds are either
element kinds (things with their own identity, such as agents or goals) or
record kinds (reified relationships such as permissions or delegations).
"""

from __future__ import annotations

from enum import Enum


class ElementKind(str, Enum):
    ROLE = "Role"
    AGENT = "Agent"
    GOAL = "Goal"
    PERSONAL_INFORMATION = "PersonalInformation"
    PUBLIC_INFORMATION = "PublicInformation"
    SITUATION = "Situation"
    VULNERABILITY = "Vulnerability"
    INTENTIONAL_THREAT = "IntentionalThreat"
    INCIDENTAL_THREAT = "IncidentalThreat"
    ATTACK_METHOD = "AttackMethod"
    PRIVACY_GOAL = "PrivacyGoal"
    PRIVACY_POLICY = "PrivacyPolicy"
    PRIVACY_MECHANISM = "PrivacyMechanism"
    PRIVACY_REQUIREMENT = "PrivacyRequirement"


class RecordKind(str, Enum):
    USE = "Use"
    PERMISSION = "Permission"
    PROVISION = "Provision"
    DELEGATION = "Delegation"
    TRUST = "Trust"
    MONITOR = "Monitor"
    IMPACT = "Impact"


NodeKind = ElementKind | RecordKind

# Abstract classes of the ontology, each covered by its concrete kinds.
ACTOR = frozenset({ElementKind.ROLE, ElementKind.AGENT})
INFORMATION = frozenset({ElementKind.PERSONAL_INFORMATION, ElementKind.PUBLIC_INFORMATION})
THREAT = frozenset({ElementKind.INTENTIONAL_THREAT, ElementKind.INCIDENTAL_THREAT})
PRIVACY_CONSTRAINT = frozenset({ElementKind.PRIVACY_POLICY, ElementKind.PRIVACY_MECHANISM})


class _OrderedEnum(str, Enum):
    """String enum ordered by declaration order instead of by value."""

    def _rank(self, other) -> tuple[int, int]:
        members = list(type(self))
        return members.index(self), members.index(other)

    def __lt__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        a, b = self._rank(other)
        return a < b

    def __le__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        a, b = self._rank(other)
        return a <= b

    def __gt__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        a, b = self._rank(other)
        return a > b

    def __ge__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        a, b = self._rank(other)
        return a >= b

    __hash__ = str.__hash__


class Sensitivity(_OrderedEnum):
    RESTRICTED = "Restricted"
    CONFIDENTIAL = "Confidential"
    SENSITIVE = "Sensitive"
    SECRET = "Secret"

    @property
    def letter(self) -> str:
        return _SENSITIVITY_LETTERS[self]

    @classmethod
    def from_letter(cls, letter: str) -> Sensitivity:
        return _SENSITIVITY_BY_LETTER[letter]


_SENSITIVITY_LETTERS = {
    Sensitivity.RESTRICTED: "R",
    Sensitivity.CONFIDENTIAL: "C",
    Sensitivity.SENSITIVE: "S",
    Sensitivity.SECRET: "T",
}
_SENSITIVITY_BY_LETTER = {v: k for k, v in _SENSITIVITY_LETTERS.items()}


class Level(_OrderedEnum):
    """Severity of an impact or probability of an incidental threat."""

    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"

    @property
    def letter(self) -> str:
        return self.value[0]

    @classmethod
    def from_letter(cls, letter: str) -> Level:
        for member in cls:
            if member.value[0] == letter:
                return member
        raise KeyError(letter)


class UseType(str, Enum):
    PRODUCE = "Produce"
    READ = "Read"
    MODIFY = "Modify"
    COLLECT = "Collect"


# Permissions share the type-of-use vocabulary.
PermissionType = UseType


class NeedToUse(str, Enum):
    REQUIRE = "Require"
    OPTIONAL = "Optional"


class PurposeOfUse(str, Enum):
    COMPATIBLE = "Compatible"
    INCOMPATIBLE = "Incompatible"


class ProvisionType(str, Enum):
    CONFIDENTIAL = "Confidential"
    NON_CONFIDENTIAL = "NonConfidential"


class DelegationKind(str, Enum):
    GOAL = "GoalDelegation"
    PERMISSION = "PermissionDelegation"


class TrustKind(str, Enum):
    GOAL = "GoalTrust"
    PERMISSION = "PermissionTrust"


class MonitorKind(str, Enum):
    GOAL = "GoalMonitor"
    PERMISSION = "PermissionMonitor"


class TrustLevel(str, Enum):
    TRUST = "Trust"
    DISTRUST = "Distrust"


class ThreatKind(str, Enum):
    INTENTIONAL = "Intentional"
    INCIDENTAL = "Incidental"

    @property
    def element_kind(self) -> ElementKind:
        if self is ThreatKind.INTENTIONAL:
            return ElementKind.INTENTIONAL_THREAT
        return ElementKind.INCIDENTAL_THREAT


class RequirementKind(str, Enum):
    CONFIDENTIALITY = "Confidentiality"
    ANONYMITY = "Anonymity"
    UNLINKABILITY = "Unlinkability"
    UNOBSERVABILITY = "Unobservability"
    NOTICE = "Notice"
    TRANSPARENCY = "Transparency"
    ACCOUNTABILITY = "Accountability"


class Capability(str, Enum):
    ANONYMIZE = "Anonymize"
    UNLINK = "Unlink"
    OTHER = "Other"


class Relation(str, Enum):
    """Plain binary relations stored as edges of the model graph."""

    AIMS = "aims"
    PLAYS = "plays"
    IS_A = "is_a"
    PART_OF = "partOf"
    OWN = "own"
    DESCRIBES = "describes"
    DETERMINES = "determines"
    IS_SUBJECT_TO = "isSubjectTo"
    MITIGATES = "mitigates"
    REALIZED_BY = "realizedBy"
    AND_DECOMPOSED = "andDecomposed"
    OR_DECOMPOSED = "orDecomposed"
    ADOPTS = "adopts"
    INTENDS = "intends"
    INCLUDES = "includes"
    EXPLOITS = "exploits"
    THREATEN = "threaten"
    APPLIED_TO = "appliedTo"
    CONCERNING = "concerning"
    INTERPRETED_BY = "interpretedBy"


HIERARCHY_RELATIONS = (Relation.IS_A, Relation.PART_OF)
DECOMPOSITION_RELATIONS = (Relation.AND_DECOMPOSED, Relation.OR_DECOMPOSED)

_K = ElementKind
_R = RecordKind


def _one(*kinds: NodeKind) -> frozenset:
    return frozenset(kinds)


# property name -> (domain kinds, range kinds)
PROPERTY_SIGNATURES: dict[str, tuple[frozenset, frozenset]] = {
    "adopts": (ACTOR, _one(_R.DELEGATION)),
    "aims": (ACTOR, _one(_K.GOAL)),
    "andDecomposed": (_one(_K.GOAL), _one(_K.GOAL)),
    "appliedTo": (_one(_K.PRIVACY_MECHANISM), _one(_K.PERSONAL_INFORMATION)),
    "concerning": (_one(_K.PRIVACY_REQUIREMENT), _one(_K.PERSONAL_INFORMATION)),
    "delegatee": (_one(_R.DELEGATION), ACTOR),
    "delegator": (ACTOR, _one(_R.DELEGATION)),
    "describes": (_one(_K.PERSONAL_INFORMATION), _one(_K.GOAL)),
    # The level is carried on the edge; its target is the information whose
    # sensitivity the situation determines.
    "determines": (_one(_K.SITUATION), _one(_K.PERSONAL_INFORMATION)),
    "exploits": (THREAT, _one(_K.VULNERABILITY)),
    "goalDelegatum": (_one(_R.DELEGATION), _one(_K.GOAL)),
    "goalTrustum": (_one(_R.TRUST), _one(_K.GOAL)),
    "hasImpact": (THREAT, _one(_R.IMPACT)),
    "hasPermission": (ACTOR, _one(_R.PERMISSION)),
    "impactOver": (_one(_R.IMPACT), _one(_K.PERSONAL_INFORMATION)),
    "includes": (_one(_K.INTENTIONAL_THREAT), _one(_K.ATTACK_METHOD)),
    "intends": (ACTOR, _one(_K.INTENTIONAL_THREAT)),
    "interpretedBy": (_one(_K.PRIVACY_REQUIREMENT), _one(_K.PRIVACY_GOAL)),
    "is_a": (_one(_K.ROLE), _one(_K.ROLE)),
    "isSubjectTo": (_one(_K.PERSONAL_INFORMATION), _one(_K.VULNERABILITY)),
    "mitigates": (_one(_K.PRIVACY_GOAL), _one(_K.VULNERABILITY)),
    "monitor": (ACTOR, _one(_R.MONITOR)),
    "monitoree": (_one(_R.MONITOR), ACTOR),
    "ofGoal": (_one(_R.MONITOR), _one(_K.GOAL)),
    "ofPermission": (_one(_R.MONITOR), _one(_R.PERMISSION)),
    "orDecomposed": (_one(_K.GOAL), _one(_K.GOAL)),
    "over": (_one(_R.PERMISSION), _one(_K.PERSONAL_INFORMATION)),
    "own": (ACTOR, _one(_K.PERSONAL_INFORMATION)),
    "partOf": (INFORMATION, INFORMATION),
    "perm.Delegatum": (_one(_R.DELEGATION), _one(_R.PERMISSION)),
    "perm.Trustum": (_one(_R.TRUST), _one(_R.PERMISSION)),
    "plays": (_one(_K.AGENT), _one(_K.ROLE)),
    "provideBy": (ACTOR, _one(_R.PROVISION)),
    "provideTo": (_one(_R.PROVISION), ACTOR),
    "provisionOf": (_one(_R.PROVISION), INFORMATION),
    "realizedBy": (_one(_K.PRIVACY_GOAL), PRIVACY_CONSTRAINT),
    "threaten": (THREAT, _one(_K.PERSONAL_INFORMATION)),
    "trustee": (_one(_R.TRUST), ACTOR),
    "trustor": (ACTOR, _one(_R.TRUST)),
    "usedBy": (_one(_K.GOAL), _one(_R.USE)),
    "usedOf": (_one(_R.USE), INFORMATION),
}


def relation_signature(relation: Relation) -> tuple[frozenset, frozenset]:
    return PROPERTY_SIGNATURES[relation.value]


def kind_name(kinds: frozenset) -> str:
    """Readable name for a kind set, using the abstract class name when one fits."""
    for name, group in (
        ("Actor", ACTOR),
        ("Information", INFORMATION),
        ("Threat", THREAT),
        ("PrivacyConstraint", PRIVACY_CONSTRAINT),
    ):
        if kinds == group:
            return name
    return "|".join(sorted(k.value for k in kinds))
