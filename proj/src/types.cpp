#include "mitplan/types.hpp"

#include <cctype>

#include "mitplan/errors.hpp"

namespace mitplan {

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
    if (from + count > s.size()) return false;
    for (std::size_t i = from; i < from + count; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

// "Tyyyy" or "Tyyyy.zzz"
bool technique_valid(const std::string& s) {
    if (s.size() != 5 && s.size() != 9) return false;
    if (s[0] != 'T' || !all_digits(s, 1, 4)) return false;
    if (s.size() == 9) {
        if (s[5] != '.' || !all_digits(s, 6, 3)) return false;
    }
    return true;
}

bool tactic_valid(const std::string& s) {
    return s.size() == 6 && s[0] == 'T' && s[1] == 'A' && all_digits(s, 2, 4);
}

}  // namespace

bool MitigationId::valid(const std::string& s) {
    return s.size() == 5 && s[0] == 'M' && all_digits(s, 1, 4);
}

MitigationId MitigationId::parse(const std::string& s) {
    if (!valid(s))
        throw ValidationError("bad mitigation id '" + s + "' (expected M followed by 4 digits)");
    return MitigationId{s};
}

TechniqueToken TechniqueToken::parse(const std::string& rendered) {
    const auto colon = rendered.find(':');
    if (colon == std::string::npos)
        throw ValidationError("bad technique token '" + rendered + "' (expected TAxxxx:Tyyyy[.zzz])");
    TechniqueToken t{rendered.substr(0, colon), rendered.substr(colon + 1)};
    if (!tactic_valid(t.tactic))
        throw ValidationError("bad tactic '" + t.tactic + "' in token '" + rendered + "'");
    if (!technique_valid(t.technique))
        throw ValidationError("bad technique '" + t.technique + "' in token '" + rendered + "'");
    return t;
}

}  // namespace mitplan
