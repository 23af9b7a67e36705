// error.hpp - exception hierarchy. Every failure a caller can act on is one
//  of these; the CLI maps them to exit status and a one-line diagnostic.
#ifndef SPIKEALLOC_ERROR_HPP
#define SPIKEALLOC_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spikealloc
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Shapes of two inputs disagree; axis names which dimension ("vehicles",
//  "tasks").
class DimensionError : public Error
{
public:
    DimensionError(std::string axis, const std::string &what)
            : Error(what), axis_(std::move(axis))
    {
    }
    [[nodiscard]] const std::string &axis() const noexcept { return axis_; }

private:
    std::string axis_;
};

// A value violates a domain invariant. field is a path such as "ttc[1][0]".
class ValidationError : public Error
{
public:
    ValidationError(std::string field, std::string detail)
            : Error(field + ": " + detail), field_(std::move(field)),
              detail_(std::move(detail))
    {
    }
    [[nodiscard]] const std::string &field() const noexcept { return field_; }
    [[nodiscard]] const std::string &detail() const noexcept { return detail_; }

private:
    std::string field_;
    std::string detail_;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

// An allocation uses a vehicle-task pair the connectivity matrix forbids.
class ConstraintError : public Error
{
public:
    ConstraintError(std::size_t vehicle, std::size_t task,
            const std::string &what)
            : Error(what), vehicle_(vehicle), task_(task)
    {
    }
    [[nodiscard]] std::size_t vehicle() const noexcept { return vehicle_; }
    [[nodiscard]] std::size_t task() const noexcept { return task_; }

private:
    std::size_t vehicle_;
    std::size_t task_;
};

// Scenario file problem. line is 1-based; 0 when no single line is to blame.
class ParseError : public Error
{
public:
    ParseError(std::size_t line, std::string field, std::string detail,
            std::string source = {})
            : Error(format(source, line, field, detail)), line_(line),
              field_(std::move(field)), detail_(std::move(detail)),
              source_(std::move(source))
    {
    }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] const std::string &field() const noexcept { return field_; }
    [[nodiscard]] const std::string &detail() const noexcept { return detail_; }
    [[nodiscard]] const std::string &source() const noexcept { return source_; }

private:
    static std::string format(const std::string &source, std::size_t line,
            const std::string &field, const std::string &detail)
    {
        std::string out = source.empty() ? "" : source + ":";
        out += "line " + std::to_string(line);
        if (!field.empty())
        {
            out += " (" + field + ")";
        }
        return out + ": " + detail;
    }

    std::size_t line_;
    std::string field_;
    std::string detail_;
    std::string source_;
};

// Exhaustive search refused because the solution space exceeds the budget.
class BudgetError : public Error
{
public:
    BudgetError(std::string count, const std::string &what)
            : Error(what), count_(std::move(count))
    {
    }
    [[nodiscard]] const std::string &count() const noexcept { return count_; }

private:
    std::string count_;
};

} // namespace spikealloc

#endif
