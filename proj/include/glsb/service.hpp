#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <httplib.h>

#include "glsb/project.hpp"

namespace glsb {

struct ServiceOptions {
    std::filesystem::path project_root;
    /// Built UI assets served under /; skipped when absent.
    std::optional<std::filesystem::path> ui_dir;
};

/// HTTP front end over project directories below project_root. Writers to a
/// project are serialized; readers work on the last published snapshot.
class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    bool listen(const std::string& host, int port);
    /// Binds to an ephemeral port and returns it; use with listen_after_bind.
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    bool is_running() const;

private:
    struct Handle {
        std::mutex writer;
        std::mutex snapshot_mutex;
        std::shared_ptr<const Project> snapshot;

        std::shared_ptr<const Project> current();
        void publish(Project next);
    };

    void routes();
    std::shared_ptr<Handle> handle(const std::string& id, bool must_exist = true);
    std::filesystem::path project_dir(const std::string& id) const;

    ServiceOptions options_;
    httplib::Server server_;
    std::mutex handles_mutex_;
    std::map<std::string, std::shared_ptr<Handle>> handles_;
};

}  // namespace glsb
