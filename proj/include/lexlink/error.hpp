#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lexlink {

enum class ErrorCode {
    // orthography
    EmptyInput,
    LeadingDiacritic,
    DoubleVowel,
    ConflictingMarks,
    NonArabicCharacter,
    // lexicon store
    DuplicateLexiconId,
    UnknownLexicon,
    UnknownLemma,
    MalformedRow,
    ValidationFailure,
    InvalidQuery,
    // mapping engine
    NotAVerbPair,
    NotANounPair,
    UnknownCorrespondence,
    UnknownRelation,
    DuplicatePair,
    SelfMapping,
    AlreadyDecided,
    // corpus linker
    DuplicateCorpusId,
    UnknownCorpus,
    // metrics
    ItemSetMismatch,
    EmptyItemSet,
    NotEnoughAnnotators,
    // workspace
    StoreLocked,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::LeadingDiacritic: return "LeadingDiacritic";
    case ErrorCode::DoubleVowel: return "DoubleVowel";
    case ErrorCode::ConflictingMarks: return "ConflictingMarks";
    case ErrorCode::NonArabicCharacter: return "NonArabicCharacter";
    case ErrorCode::DuplicateLexiconId: return "DuplicateLexiconId";
    case ErrorCode::UnknownLexicon: return "UnknownLexicon";
    case ErrorCode::UnknownLemma: return "UnknownLemma";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::ValidationFailure: return "ValidationFailure";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::NotAVerbPair: return "NotAVerbPair";
    case ErrorCode::NotANounPair: return "NotANounPair";
    case ErrorCode::UnknownCorrespondence: return "UnknownCorrespondence";
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::DuplicatePair: return "DuplicatePair";
    case ErrorCode::SelfMapping: return "SelfMapping";
    case ErrorCode::AlreadyDecided: return "AlreadyDecided";
    case ErrorCode::DuplicateCorpusId: return "DuplicateCorpusId";
    case ErrorCode::UnknownCorpus: return "UnknownCorpus";
    case ErrorCode::ItemSetMismatch: return "ItemSetMismatch";
    case ErrorCode::EmptyItemSet: return "EmptyItemSet";
    case ErrorCode::NotEnoughAnnotators: return "NotEnoughAnnotators";
    case ErrorCode::StoreLocked: return "StoreLocked";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Base exception for every failure raised by the library. The code names
/// the failure class; the message carries human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct Violation {
    std::string field;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// Raised when a lemma breaks one or more guideline invariants. Every
/// violated rule is listed, not only the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(ErrorCode::ValidationFailure, summarize(violations)),
          violations_(std::move(violations)) {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string summarize(const std::vector<Violation>& vs) {
        std::string out;
        for (const auto& v : vs) {
            if (!out.empty()) out += "; ";
            out += v.field + ": " + v.message;
        }
        return out;
    }

    std::vector<Violation> violations_;
};

}  // namespace lexlink
