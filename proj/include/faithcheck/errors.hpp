#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace faithcheck {

// Base for all library errors. `tag()` is the stable machine-readable name
// that ends up in RunRecord failure fields and failures.csv.
class Error : public std::runtime_error {
public:
    Error(std::string tag, const std::string& message)
        : std::runtime_error(message), tag_(std::move(tag)) {}

    const std::string& tag() const noexcept { return tag_; }

private:
    std::string tag_;
};

#define FAITHCHECK_ERROR(Name, tag_literal)                     \
    class Name : public Error {                                \
    public:                                                    \
        explicit Name(const std::string& message)              \
            : Error(tag_literal, message) {}                   \
    }

FAITHCHECK_ERROR(IoError, "io-error");
FAITHCHECK_ERROR(SchemaError, "schema-error");
FAITHCHECK_ERROR(VocabError, "vocab-error");
FAITHCHECK_ERROR(EmptyDataset, "empty-dataset");
FAITHCHECK_ERROR(EmptyHypothesis, "empty-hypothesis");
FAITHCHECK_ERROR(EmptyReference, "empty-reference");
FAITHCHECK_ERROR(HypothesisTooLong, "hypothesis-too-long");
FAITHCHECK_ERROR(TransportError, "transport-error");
FAITHCHECK_ERROR(ProtocolError, "protocol-error");
FAITHCHECK_ERROR(ProtocolViolation, "protocol-violation");
FAITHCHECK_ERROR(RangeError, "range-error");
FAITHCHECK_ERROR(TemplateError, "template-error");
FAITHCHECK_ERROR(TemplateInputError, "template-input-error");
FAITHCHECK_ERROR(DegenerateRewrite, "degenerate-rewrite");
FAITHCHECK_ERROR(LengthMismatch, "length-mismatch");
FAITHCHECK_ERROR(MissingCounterpart, "missing-counterpart");
FAITHCHECK_ERROR(MissingPct, "missing-pct");
FAITHCHECK_ERROR(PairSetMismatch, "pair-set-mismatch");
FAITHCHECK_ERROR(EmptyAfterFiltering, "empty-after-filtering");
FAITHCHECK_ERROR(NoComponentsEnabled, "no-components-enabled");
FAITHCHECK_ERROR(DimensionMismatch, "dimension-mismatch");
FAITHCHECK_ERROR(CassetteMiss, "cassette-miss");
FAITHCHECK_ERROR(CassetteCorrupt, "cassette-corrupt");
FAITHCHECK_ERROR(ConfigError, "config-error");

#undef FAITHCHECK_ERROR

// ExtractionError keeps the verbatim model output for auditing.
class ExtractionError : public Error {
public:
    ExtractionError(const std::string& message, std::string raw_response)
        : Error("extraction-error", message),
          raw_response_(std::move(raw_response)) {}

    const std::string& raw_response() const noexcept { return raw_response_; }

private:
    std::string raw_response_;
};

}  // namespace faithcheck
