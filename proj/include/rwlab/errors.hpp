#pragma once

#include <stdexcept>
#include <string>

namespace rwlab {

enum class error_category { config, resource, domain, io };

inline const char* category_name(error_category c) {
    switch (c) {
        case error_category::config: return "config";
        case error_category::resource: return "resource";
        case error_category::domain: return "domain";
        case error_category::io: return "io";
    }
    return "unknown";
}

// exit codes used by the command line front end
inline int exit_code(error_category c) {
    switch (c) {
        case error_category::config: return 2;
        case error_category::resource: return 3;
        case error_category::domain: return 4;
        case error_category::io: return 5;
    }
    return 1;
}

class lab_error : public std::runtime_error {
public:
    lab_error(error_category c, const std::string& what) : std::runtime_error(what), category_(c) {}
    error_category category() const { return category_; }

private:
    error_category category_;
};

struct config_error : lab_error {
    explicit config_error(const std::string& w) : lab_error(error_category::config, w) {}
};
struct resource_error : lab_error {
    explicit resource_error(const std::string& w) : lab_error(error_category::resource, w) {}
};
struct domain_error : lab_error {
    explicit domain_error(const std::string& w) : lab_error(error_category::domain, w) {}
};
struct io_error : lab_error {
    explicit io_error(const std::string& w) : lab_error(error_category::io, w) {}
};

}  // namespace rwlab
