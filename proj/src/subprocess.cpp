#include "rtlforge/subprocess.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace rtlforge::util {

namespace {

struct Pipe {
    int fds[2] = {-1, -1};
    bool open() { return ::pipe(fds) == 0; }
    void close_read() {
        if (fds[0] >= 0) ::close(fds[0]);
        fds[0] = -1;
    }
    void close_write() {
        if (fds[1] >= 0) ::close(fds[1]);
        fds[1] = -1;
    }
    ~Pipe() {
        close_read();
        close_write();
    }
};

}  // namespace

RunResult run_command(const std::vector<std::string>& argv, const RunOptions& options) {
    RunResult result;
    if (argv.empty()) {
        result.spawn_error = "empty argv";
        return result;
    }

    Pipe out_pipe, err_pipe, status_pipe;
    if (!out_pipe.open() || !err_pipe.open() || !status_pipe.open()) {
        result.spawn_error = std::strerror(errno);
        return result;
    }
    ::fcntl(status_pipe.fds[1], F_SETFD, FD_CLOEXEC);

    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    pid_t pid = ::fork();
    if (pid < 0) {
        result.spawn_error = std::strerror(errno);
        return result;
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        if (options.cwd) {
            if (::chdir(options.cwd->c_str()) != 0) {
                int e = errno;
                (void)!::write(status_pipe.fds[1], &e, sizeof(e));
                _exit(127);
            }
        }
        ::dup2(out_pipe.fds[1], STDOUT_FILENO);
        ::dup2(err_pipe.fds[1], STDERR_FILENO);
        out_pipe.close_read();
        out_pipe.close_write();
        err_pipe.close_read();
        err_pipe.close_write();
        status_pipe.close_read();
        ::execvp(cargv[0], cargv.data());
        int e = errno;
        (void)!::write(status_pipe.fds[1], &e, sizeof(e));
        _exit(127);
    }

    out_pipe.close_write();
    err_pipe.close_write();
    status_pipe.close_write();

    auto deadline = std::chrono::steady_clock::now() + options.timeout;
    bool use_deadline = options.timeout.count() > 0;

    int exec_errno = 0;
    bool exec_failed = false;
    bool out_done = false, err_done = false, status_done = false;
    while (!out_done || !err_done || !status_done) {
        struct pollfd fds[3];
        nfds_t n = 0;
        int idx_out = -1, idx_err = -1, idx_status = -1;
        if (!out_done) {
            idx_out = static_cast<int>(n);
            fds[n++] = {out_pipe.fds[0], POLLIN, 0};
        }
        if (!err_done) {
            idx_err = static_cast<int>(n);
            fds[n++] = {err_pipe.fds[0], POLLIN, 0};
        }
        if (!status_done) {
            idx_status = static_cast<int>(n);
            fds[n++] = {status_pipe.fds[0], POLLIN, 0};
        }

        int wait_ms = -1;
        if (use_deadline) {
            auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 deadline - std::chrono::steady_clock::now())
                                 .count();
            wait_ms = remaining > 0 ? static_cast<int>(remaining) : 0;
        }
        int rc = ::poll(fds, n, wait_ms);
        if (rc < 0 && errno == EINTR) continue;
        if (rc == 0 && use_deadline) {
            result.timed_out = true;
            ::kill(-pid, SIGKILL);
            break;
        }

        char buf[8192];
        auto drain = [&](int idx, int fd, std::string& sink, bool& done) {
            if (idx < 0 || !(fds[idx].revents & (POLLIN | POLLHUP | POLLERR))) return;
            ssize_t got = ::read(fd, buf, sizeof(buf));
            if (got > 0) {
                if (sink.size() < options.max_output_bytes) {
                    sink.append(buf, static_cast<std::size_t>(
                                         std::min<std::size_t>(static_cast<std::size_t>(got),
                                                               options.max_output_bytes - sink.size())));
                }
            } else {
                done = true;
            }
        };
        drain(idx_out, out_pipe.fds[0], result.out, out_done);
        drain(idx_err, err_pipe.fds[0], result.err, err_done);
        if (idx_status >= 0 && (fds[idx_status].revents & (POLLIN | POLLHUP | POLLERR))) {
            ssize_t got = ::read(status_pipe.fds[0], &exec_errno, sizeof(exec_errno));
            if (got > 0) exec_failed = true;
            if (got <= 0 || exec_failed) status_done = true;
        }
    }

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    // Reap any stragglers in the group after a timeout kill.
    if (result.timed_out) ::kill(-pid, SIGKILL);

    if (exec_failed) {
        result.spawn_error = std::strerror(exec_errno);
        return result;
    }
    result.spawned = true;
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
    }
    return result;
}

}  // namespace rtlforge::util
