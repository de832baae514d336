#pragma once

// Flat records with a fixed column order per command, and their JSON, CSV
// and text renderings. CSV and JSON parse back into identical records.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "isodescent/family.hpp"

namespace isodescent {

inline constexpr int spec_version = 1;

enum class FieldType { integer, optional_integer, boolean, text, int_list };

struct Field {
    std::string name;
    FieldType type;
};

using Schema = std::vector<Field>;

// std::monostate is the null of an optional_integer field.
using FieldValue = std::variant<std::monostate, bool, Int, std::string, std::vector<Int>>;

struct OutputRecord {
    std::vector<std::pair<std::string, FieldValue>> fields;

    void set(std::string key, FieldValue v) { fields.emplace_back(std::move(key), std::move(v)); }

    const FieldValue& get(const std::string& key) const {
        for (const auto& [k, v] : fields)
            if (k == key) return v;
        throw std::out_of_range("OutputRecord: no field " + key);
    }

    friend bool operator==(const OutputRecord&, const OutputRecord&) = default;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace schemas {

inline const Schema& classify() {
    static const Schema s{{"spec_version", FieldType::integer},   {"p", FieldType::integer},
                          {"mod24", FieldType::integer},          {"quartic2", FieldType::optional_integer},
                          {"psibar_case", FieldType::integer},    {"theorem_bound", FieldType::text}};
    return s;
}

inline const Schema& selmer() {
    static const Schema s{{"spec_version", FieldType::integer},
                          {"p", FieldType::integer},
                          {"mod24", FieldType::integer},
                          {"quartic2", FieldType::optional_integer},
                          {"closed_selmer_psibar", FieldType::int_list},
                          {"engine_selmer_psibar", FieldType::int_list},
                          {"closed_selmer_psi", FieldType::int_list},
                          {"engine_selmer_psi", FieldType::int_list},
                          {"selmer_psibar_symbolic", FieldType::text},
                          {"selmer_psi_symbolic", FieldType::text},
                          {"consistent", FieldType::boolean}};
    return s;
}

inline const Schema& rank() {
    static const Schema s{{"spec_version", FieldType::integer},
                          {"p", FieldType::integer},
                          {"mod24", FieldType::integer},
                          {"quartic2", FieldType::optional_integer},
                          {"dim_selmer_psibar", FieldType::integer},
                          {"dim_selmer_psi", FieldType::integer},
                          {"dim_im_alpha", FieldType::integer},
                          {"dim_im_alphabar", FieldType::integer},
                          {"lower", FieldType::integer},
                          {"upper", FieldType::integer},
                          {"theorem_bound", FieldType::text},
                          {"proposition", FieldType::text},
                          {"height_bound", FieldType::integer},
                          {"consistent", FieldType::boolean}};
    return s;
}

inline const Schema& repr() {
    static const Schema s{{"spec_version", FieldType::integer}, {"p", FieldType::integer},
                          {"a_3p", FieldType::optional_integer}, {"b_3p", FieldType::optional_integer},
                          {"a_p", FieldType::optional_integer},  {"b_p", FieldType::optional_integer}};
    return s;
}

inline const Schema& scan() {
    static const Schema s{{"spec_version", FieldType::integer},
                          {"p", FieldType::integer},
                          {"mod24", FieldType::integer},
                          {"quartic2", FieldType::optional_integer},
                          {"selmer_psibar", FieldType::int_list},
                          {"selmer_psi", FieldType::int_list},
                          {"selmer_psibar_symbolic", FieldType::text},
                          {"selmer_psi_symbolic", FieldType::text},
                          {"dim_selmer_psibar", FieldType::integer},
                          {"dim_selmer_psi", FieldType::integer},
                          {"dim_im_alpha", FieldType::integer},
                          {"dim_im_alphabar", FieldType::integer},
                          {"lower", FieldType::integer},
                          {"upper", FieldType::integer},
                          {"theorem_bound", FieldType::text},
                          {"proposition", FieldType::text},
                          {"height_bound", FieldType::integer},
                          {"consistent", FieldType::boolean}};
    return s;
}

inline const Schema& descent() {
    static const Schema s{{"spec_version", FieldType::integer},   {"a", FieldType::integer},
                          {"b", FieldType::integer},              {"selmer_psibar", FieldType::int_list},
                          {"selmer_psi", FieldType::int_list},    {"im_alpha", FieldType::int_list},
                          {"im_alphabar", FieldType::int_list},   {"dim_selmer_psibar", FieldType::integer},
                          {"dim_selmer_psi", FieldType::integer}, {"dim_im_alpha", FieldType::integer},
                          {"dim_im_alphabar", FieldType::integer}, {"lower", FieldType::integer},
                          {"upper", FieldType::integer},          {"height_bound", FieldType::integer},
                          {"consistent", FieldType::boolean}};
    return s;
}

}  // namespace schemas

namespace detail {

inline FieldValue optional_int(const std::optional<int>& v) {
    if (!v) return std::monostate{};
    return Int(*v);
}

inline void put_class_fields(OutputRecord& r, const PrimeClass& c) {
    r.set("spec_version", Int(spec_version));
    r.set("p", Int(c.p));
    r.set("mod24", Int(c.residue_mod_24));
    r.set("quartic2", optional_int(c.quartic2));
}

inline std::string symbolic_list(const std::vector<Int>& classes, std::uint64_t p) {
    std::string s;
    for (const Int& c : classes) s += (s.empty() ? "" : ";") + symbolic_class(c, p);
    return s;
}

inline void put_bounds(OutputRecord& r, const RankBounds& b) {
    r.set("dim_selmer_psibar", Int(b.dim_selmer_psibar));
    r.set("dim_selmer_psi", Int(b.dim_selmer_psi));
    r.set("dim_im_alpha", Int(b.dim_im_alpha));
    r.set("dim_im_alphabar", Int(b.dim_im_alphabar));
    r.set("lower", Int(b.lower));
    r.set("upper", Int(b.upper));
}

}  // namespace detail

inline OutputRecord classify_record(std::uint64_t p) {
    OutputRecord r;
    const PrimeClass c = classify(p);
    detail::put_class_fields(r, c);
    r.set("psibar_case", Int(psibar_case(c)));
    r.set("theorem_bound", theorem_bound(p).str());
    return r;
}

inline OutputRecord selmer_record(const FamilyReport& f) {
    OutputRecord r;
    detail::put_class_fields(r, f.prime_class);
    r.set("closed_selmer_psibar", f.closed_psibar.classes);
    r.set("engine_selmer_psibar", f.engine_psibar.classes);
    r.set("closed_selmer_psi", f.closed_psi.classes);
    r.set("engine_selmer_psi", f.engine_psi.classes);
    r.set("selmer_psibar_symbolic", detail::symbolic_list(f.engine_psibar.classes, f.prime_class.p));
    r.set("selmer_psi_symbolic", detail::symbolic_list(f.engine_psi.classes, f.prime_class.p));
    r.set("consistent", f.consistent);
    return r;
}

inline OutputRecord rank_record(const FamilyReport& f) {
    OutputRecord r;
    detail::put_class_fields(r, f.prime_class);
    detail::put_bounds(r, f.rank_bounds);
    r.set("theorem_bound", f.bound.str());
    r.set("proposition", f.proposition ? f.proposition->str() : std::string());
    r.set("height_bound", Int(f.height_bound));
    r.set("consistent", f.consistent);
    return r;
}

inline OutputRecord scan_record(const FamilyReport& f) {
    OutputRecord r;
    detail::put_class_fields(r, f.prime_class);
    r.set("selmer_psibar", f.engine_psibar.classes);
    r.set("selmer_psi", f.engine_psi.classes);
    r.set("selmer_psibar_symbolic", detail::symbolic_list(f.engine_psibar.classes, f.prime_class.p));
    r.set("selmer_psi_symbolic", detail::symbolic_list(f.engine_psi.classes, f.prime_class.p));
    detail::put_bounds(r, f.rank_bounds);
    r.set("theorem_bound", f.bound.str());
    r.set("proposition", f.proposition ? f.proposition->str() : std::string());
    r.set("height_bound", Int(f.height_bound));
    r.set("consistent", f.consistent);
    return r;
}

inline OutputRecord repr_record(std::uint64_t p) {
    require_prime(p, "repr_record");
    OutputRecord r;
    r.set("spec_version", Int(spec_version));
    r.set("p", Int(p));
    const auto put = [&](const char* ka, const char* kb, const std::optional<ReprWitness>& w) {
        if (w && witness_valid(p, *w)) {
            r.set(ka, Int(w->a));
            r.set(kb, Int(w->b));
        } else {
            r.set(ka, std::monostate{});
            r.set(kb, std::monostate{});
        }
    };
    put("a_3p", "b_3p", find_repr(3 * Int(p), 2));
    put("a_p", "b_p", find_repr(Int(p), 18));
    return r;
}

inline OutputRecord descent_record(const CurveModel& e, const DescentResult& d, bool consistent) {
    OutputRecord r;
    r.set("spec_version", Int(spec_version));
    r.set("a", e.a());
    r.set("b", e.b());
    r.set("selmer_psibar", d.selmer_psibar.classes);
    r.set("selmer_psi", d.selmer_psi.classes);
    r.set("im_alpha", d.image_alpha.classes);
    r.set("im_alphabar", d.image_alphabar.classes);
    detail::put_bounds(r, d.bounds);
    r.set("height_bound", Int(d.height_bound));
    r.set("consistent", consistent);
    return r;
}

namespace detail {

inline void check_shape(const OutputRecord& r, const Schema& s) {
    if (r.fields.size() != s.size()) throw FormatError("record does not match schema");
    for (std::size_t i = 0; i < s.size(); ++i)
        if (r.fields[i].first != s[i].name) throw FormatError("record field " + r.fields[i].first + " out of order");
}

inline std::string list_to_text(const std::vector<Int>& v) {
    std::string s;
    for (const Int& x : v) s += (s.empty() ? "" : ";") + x.str();
    return s;
}

inline std::string cell_text(const FieldValue& v) {
    struct V {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(const Int& i) const { return i.str(); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(const std::vector<Int>& l) const { return list_to_text(l); }
    };
    return std::visit(V{}, v);
}

inline Int parse_int(const std::string& s) {
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size()) throw FormatError("bad integer '" + s + "'");
    for (std::size_t j = i; j < s.size(); ++j)
        if (s[j] < '0' || s[j] > '9') throw FormatError("bad integer '" + s + "'");
    return Int(s);
}

inline FieldValue cell_value(const std::string& s, FieldType t) {
    switch (t) {
        case FieldType::integer: return parse_int(s);
        case FieldType::optional_integer:
            if (s.empty()) return std::monostate{};
            return parse_int(s);
        case FieldType::boolean:
            if (s == "true") return true;
            if (s == "false") return false;
            throw FormatError("bad boolean '" + s + "'");
        case FieldType::text: return s;
        case FieldType::int_list: {
            std::vector<Int> out;
            if (s.empty()) return out;
            std::size_t start = 0;
            while (true) {
                const std::size_t end = s.find(';', start);
                out.push_back(parse_int(s.substr(start, end - start)));
                if (end == std::string::npos) break;
                start = end + 1;
            }
            return out;
        }
    }
    throw FormatError("unknown field type");
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

// Integers that fit in 64 bits become JSON numbers, wider ones strings.
inline nlohmann::ordered_json int_json(const Int& i) {
    if (i >= std::numeric_limits<std::int64_t>::min() && i <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(i);
    return i.str();
}

inline Int json_int(const nlohmann::ordered_json& j) {
    if (j.is_number_integer()) return j.is_number_unsigned() ? Int(j.get<std::uint64_t>()) : Int(j.get<std::int64_t>());
    if (j.is_string()) return parse_int(j.get<std::string>());
    throw FormatError("expected integer, got " + j.dump());
}

}  // namespace detail

inline std::string to_csv(const std::vector<OutputRecord>& records, const Schema& schema) {
    std::string out;
    for (std::size_t i = 0; i < schema.size(); ++i) out += (i ? "," : "") + detail::csv_quote(schema[i].name);
    out += "\n";
    for (const auto& r : records) {
        detail::check_shape(r, schema);
        for (std::size_t i = 0; i < r.fields.size(); ++i)
            out += (i ? "," : "") + detail::csv_quote(detail::cell_text(r.fields[i].second));
        out += "\n";
    }
    return out;
}

/// RFC 4180 reader: quoted fields may hold commas, doubled quotes and line breaks.
inline std::vector<std::vector<std::string>> parse_csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += ch;
            }
            continue;
        }
        if (ch == '"') {
            quoted = true;
            any = true;
        } else if (ch == ',') {
            row.push_back(std::move(cell));
            cell.clear();
            any = true;
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(std::move(cell));
            cell.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            cell += ch;
            any = true;
        }
    }
    if (quoted) throw FormatError("unterminated quoted field");
    if (any) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<OutputRecord> from_csv(const std::string& text, const Schema& schema) {
    const auto rows = parse_csv_rows(text);
    if (rows.empty()) throw FormatError("missing CSV header");
    if (rows[0].size() != schema.size()) throw FormatError("CSV header does not match schema");
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (rows[0][i] != schema[i].name) throw FormatError("unexpected CSV column " + rows[0][i]);
    std::vector<OutputRecord> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != schema.size()) throw FormatError("CSV row " + std::to_string(r) + " has wrong width");
        OutputRecord rec;
        for (std::size_t i = 0; i < schema.size(); ++i)
            rec.set(schema[i].name, detail::cell_value(rows[r][i], schema[i].type));
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::string to_json(const std::vector<OutputRecord>& records, const Schema& schema) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        detail::check_shape(r, schema);
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (const auto& [k, v] : r.fields) {
            struct V {
                nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
                nlohmann::ordered_json operator()(bool b) const { return b; }
                nlohmann::ordered_json operator()(const Int& i) const { return detail::int_json(i); }
                nlohmann::ordered_json operator()(const std::string& s) const { return s; }
                nlohmann::ordered_json operator()(const std::vector<Int>& l) const {
                    nlohmann::ordered_json a = nlohmann::ordered_json::array();
                    for (const Int& x : l) a.push_back(detail::int_json(x));
                    return a;
                }
            };
            obj[k] = std::visit(V{}, v);
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

inline std::vector<OutputRecord> from_json(const std::string& text, const Schema& schema) {
    nlohmann::ordered_json arr;
    try {
        arr = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(e.what());
    }
    if (!arr.is_array()) throw FormatError("expected a JSON array");
    std::vector<OutputRecord> out;
    for (const auto& obj : arr) {
        if (!obj.is_object() || obj.size() != schema.size()) throw FormatError("object does not match schema");
        OutputRecord rec;
        std::size_t i = 0;
        for (auto it = obj.begin(); it != obj.end(); ++it, ++i) {
            const Field& f = schema[i];
            if (it.key() != f.name) throw FormatError("unexpected key " + it.key());
            const auto& j = it.value();
            switch (f.type) {
                case FieldType::integer: rec.set(f.name, detail::json_int(j)); break;
                case FieldType::optional_integer:
                    rec.set(f.name, j.is_null() ? FieldValue(std::monostate{}) : FieldValue(detail::json_int(j)));
                    break;
                case FieldType::boolean:
                    if (!j.is_boolean()) throw FormatError("expected boolean for " + f.name);
                    rec.set(f.name, j.get<bool>());
                    break;
                case FieldType::text:
                    if (!j.is_string()) throw FormatError("expected string for " + f.name);
                    rec.set(f.name, j.get<std::string>());
                    break;
                case FieldType::int_list: {
                    if (!j.is_array()) throw FormatError("expected array for " + f.name);
                    std::vector<Int> l;
                    for (const auto& x : j) l.push_back(detail::json_int(x));
                    rec.set(f.name, std::move(l));
                    break;
                }
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::string to_text(const std::vector<OutputRecord>& records, const Schema& schema) {
    std::vector<std::vector<std::string>> cells{{}};
    for (const auto& f : schema) cells[0].push_back(f.name);
    for (const auto& r : records) {
        detail::check_shape(r, schema);
        std::vector<std::string> row;
        for (const auto& [k, v] : r.fields) row.push_back(std::holds_alternative<std::monostate>(v) ? "-" : detail::cell_text(v));
        cells.push_back(std::move(row));
    }
    std::vector<std::size_t> width(schema.size(), 0);
    for (const auto& row : cells)
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    std::string out;
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += row[i];
            if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
        }
        out += line + "\n";
    }
    return out;
}

enum class OutputFormat { json, csv, text };

inline std::string render(const std::vector<OutputRecord>& records, const Schema& schema, OutputFormat fmt) {
    switch (fmt) {
        case OutputFormat::json: return to_json(records, schema);
        case OutputFormat::csv: return to_csv(records, schema);
        case OutputFormat::text: return to_text(records, schema);
    }
    throw std::invalid_argument("render: unknown format");
}

/// Writes to a sibling temporary and renames it over path, so a failed run
/// never leaves a partial file behind.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

}  // namespace isodescent
