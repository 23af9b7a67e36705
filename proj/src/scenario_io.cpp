// Scenario file reader/writer. One "key = value" entry per field; values are
//  JSON literals and may span several lines while brackets are open.
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spikealloc/error.hpp"
#include "spikealloc/scenario.hpp"

namespace spikealloc
{

namespace
{

constexpr std::string_view kHeader = "# spikealloc-scenario v1";

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

int bracket_depth(std::string_view s)
{
    int depth = 0;
    for (char c : s)
    {
        if (c == '[' || c == '{')
        {
            ++depth;
        }
        else if (c == ']' || c == '}')
        {
            --depth;
        }
    }
    return depth;
}

std::string format_double(double v)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string out(buf, end);
    // keep reals visibly real
    if (out.find_first_of(".eEn") == std::string::npos)
    {
        out += ".0";
    }
    return out;
}

template <typename T, typename Fmt>
std::string format_list(std::span<const T> values, Fmt fmt)
{
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i > 0)
        {
            out += ", ";
        }
        out += fmt(values[i]);
    }
    return out + "]";
}

template <typename T, typename Fmt>
std::string format_matrix(const Matrix<T> &m, Fmt fmt)
{
    std::string out = "[\n";
    for (std::size_t r = 0; r < m.rows(); ++r)
    {
        out += "  " + format_list<T>(m.row(r), fmt);
        out += (r + 1 < m.rows()) ? ",\n" : "\n";
    }
    return out + "]";
}

struct Entry
{
    std::size_t line;
    nlohmann::json value;
};

using Entries = std::map<std::string, Entry>;

double as_real(const Entry &e, const std::string &field)
{
    if (!e.value.is_number())
    {
        throw ParseError(e.line, field, "expected a number");
    }
    return e.value.get<double>();
}

std::size_t as_count(const Entry &e, const std::string &field)
{
    if (!e.value.is_number_unsigned() || e.value.get<std::uint64_t>() == 0)
    {
        throw ParseError(e.line, field, "expected a positive integer");
    }
    return e.value.get<std::size_t>();
}

std::vector<double> as_real_list(const Entry &e, const std::string &field,
        std::size_t expected)
{
    if (!e.value.is_array())
    {
        throw ParseError(e.line, field, "expected an array");
    }
    if (e.value.size() != expected)
    {
        throw ParseError(e.line, field, "expected " + std::to_string(expected) +
                        " entries, found " + std::to_string(e.value.size()));
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < e.value.size(); ++k)
    {
        const std::string path = field + "[" + std::to_string(k) + "]";
        out.push_back(as_real({e.line, e.value[k]}, path));
    }
    return out;
}

template <typename T, typename Conv>
Matrix<T> as_matrix(const Entry &e, const std::string &field, std::size_t rows,
        std::size_t cols, Conv conv)
{
    if (!e.value.is_array() || e.value.size() != rows)
    {
        throw ParseError(e.line, field,
                "expected " + std::to_string(rows) + " rows (one per vehicle)");
    }
    Matrix<T> out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
    {
        const std::string row_path = field + "[" + std::to_string(r) + "]";
        const auto &row = e.value[r];
        if (!row.is_array() || row.size() != cols)
        {
            throw ParseError(e.line, row_path,
                    "expected " + std::to_string(cols) +
                            " columns (one per task)");
        }
        for (std::size_t c = 0; c < cols; ++c)
        {
            out(r, c) = conv(Entry{e.line, row[c]},
                    row_path + "[" + std::to_string(c) + "]");
        }
    }
    return out;
}

Entries read_entries(std::string_view text)
{
    static const std::map<std::string, bool> known = {{"n_vehicles", true},
            {"m_tasks", true}, {"priority", true}, {"success", true},
            {"ttc", true}, {"connectivity", false}, {"weights", false},
            {"allow_unassignable", false}};

    Entries entries;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    bool saw_header = false;

    std::string pending_key;
    std::string pending_value;
    std::size_t pending_line = 0;

    while (std::getline(in, raw))
    {
        ++line_no;
        const std::string line = trim(raw);
        if (!pending_key.empty())
        {
            pending_value += '\n' + line;
        }
        else
        {
            if (!saw_header)
            {
                if (line.empty())
                {
                    continue;
                }
                if (line != kHeader)
                {
                    throw ParseError(line_no, "",
                            "missing header '" + std::string(kHeader) + "'");
                }
                saw_header = true;
                continue;
            }
            if (line.empty() || line.front() == '#')
            {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
            {
                throw ParseError(line_no, "", "expected 'key = value'");
            }
            pending_key = trim(std::string_view(line).substr(0, eq));
            pending_value = trim(std::string_view(line).substr(eq + 1));
            pending_line = line_no;
            if (!known.contains(pending_key))
            {
                throw ParseError(line_no, pending_key, "unknown field");
            }
            if (entries.contains(pending_key))
            {
                throw ParseError(line_no, pending_key, "duplicate field");
            }
        }
        if (bracket_depth(pending_value) > 0)
        {
            continue;
        }
        nlohmann::json value;
        try
        {
            value = nlohmann::json::parse(pending_value);
        }
        catch (const nlohmann::json::parse_error &err)
        {
            throw ParseError(pending_line, pending_key,
                    std::string("malformed value: ") + err.what());
        }
        entries.emplace(pending_key, Entry{pending_line, std::move(value)});
        pending_key.clear();
        pending_value.clear();
    }
    if (!saw_header)
    {
        throw ParseError(line_no, "",
                "missing header '" + std::string(kHeader) + "'");
    }
    if (!pending_key.empty())
    {
        throw ParseError(pending_line, pending_key, "unterminated value");
    }
    for (const auto &[key, required] : known)
    {
        if (required && !entries.contains(key))
        {
            throw ParseError(line_no, key, "missing required field");
        }
    }
    return entries;
}

// Line of the entry a validation path like "ttc[1][0]" belongs to.
std::size_t line_of(const Entries &entries, const std::string &path)
{
    const std::string key = path.substr(0, path.find_first_of("[."));
    const auto it = entries.find(key);
    return it == entries.end() ? 0 : it->second.line;
}

} // namespace

Scenario parse_scenario(std::string_view text)
{
    const Entries entries = read_entries(text);
    Scenario s;
    s.n_vehicles = as_count(entries.at("n_vehicles"), "n_vehicles");
    s.m_tasks = as_count(entries.at("m_tasks"), "m_tasks");
    s.priority = as_real_list(entries.at("priority"), "priority", s.m_tasks);
    s.success = as_real_list(entries.at("success"), "success", s.m_tasks);
    s.ttc = as_matrix<double>(entries.at("ttc"), "ttc", s.n_vehicles, s.m_tasks,
            as_real);

    if (const auto it = entries.find("connectivity"); it != entries.end())
    {
        s.connectivity = as_matrix<std::uint8_t>(it->second, "connectivity",
                s.n_vehicles, s.m_tasks,
                [](const Entry &e, const std::string &field) -> std::uint8_t {
                    if (!e.value.is_number_unsigned() ||
                            e.value.get<std::uint64_t>() > 1)
                    {
                        throw ParseError(e.line, field, "expected 0 or 1");
                    }
                    return static_cast<std::uint8_t>(e.value.get<int>());
                });
    }
    else
    {
        s.connectivity = Matrix<std::uint8_t>(s.n_vehicles, s.m_tasks, 1);
    }

    if (const auto it = entries.find("weights"); it != entries.end())
    {
        const auto w = as_real_list(it->second, "weights", 3);
        s.weights = RateWeights{w[0], w[1], w[2]};
    }
    if (const auto it = entries.find("allow_unassignable"); it != entries.end())
    {
        if (!it->second.value.is_boolean())
        {
            throw ParseError(it->second.line, "allow_unassignable",
                    "expected true or false");
        }
        s.allow_unassignable = it->second.value.get<bool>();
    }

    try
    {
        s.validate();
    }
    catch (const ValidationError &err)
    {
        throw ParseError(line_of(entries, err.field()), err.field(), err.detail());
    }
    catch (const DimensionError &err)
    {
        throw ParseError(0, err.axis(), err.what());
    }
    return s;
}

std::string format_scenario(const Scenario &s)
{
    s.validate();
    const auto real = [](double v) { return format_double(v); };
    const auto bit = [](std::uint8_t v) { return std::to_string(v); };
    std::ostringstream out;
    out << kHeader << '\n';
    out << "n_vehicles = " << s.n_vehicles << '\n';
    out << "m_tasks = " << s.m_tasks << '\n';
    out << "priority = " << format_list<double>(s.priority, real) << '\n';
    out << "success = " << format_list<double>(s.success, real) << '\n';
    out << "ttc = " << format_matrix(s.ttc, real) << '\n';
    out << "connectivity = " << format_matrix(s.connectivity, bit) << '\n';
    const double w[] = {s.weights.w_p, s.weights.w_s, s.weights.w_t};
    out << "weights = " << format_list<double>(w, real) << '\n';
    if (s.allow_unassignable)
    {
        out << "allow_unassignable = true\n";
    }
    return out.str();
}

Scenario load_scenario(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw Error("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try
    {
        return parse_scenario(buf.str());
    }
    catch (const ParseError &err)
    {
        throw ParseError(err.line(), err.field(), err.detail(), path);
    }
}

void save_scenario(const Scenario &scenario, const std::string &path)
{
    const std::string text = format_scenario(scenario);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw Error("cannot write scenario file '" + path + "'");
    }
    out << text;
    if (!out)
    {
        throw Error("failed writing scenario file '" + path + "'");
    }
}

} // namespace spikealloc
