#include "cdd/history/process.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <mutex>
#include <poll.h>
#include <signal.h>
#include <stdexcept>
#include <sys/wait.h>
#include <unistd.h>

namespace cdd::history {

namespace {

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

} // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          const std::optional<std::string>& cwd) {
    if (argv.empty()) throw std::invalid_argument("run_process: empty argv");
    int in_pipe[2], out_pipe[2], err_pipe[2], exec_pipe[2];
    if (::pipe(in_pipe) || ::pipe(out_pipe) || ::pipe(err_pipe) || ::pipe2(exec_pipe, O_CLOEXEC))
        throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));

    // Built before fork: the child may only make async-signal-safe calls.
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::dup2(in_pipe[0], 0);
        ::dup2(out_pipe[1], 1);
        ::dup2(err_pipe[1], 2);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
        ::close(exec_pipe[0]);
        if (cwd && ::chdir(cwd->c_str()) != 0) {
            int e = errno;
            (void)!::write(exec_pipe[1], &e, sizeof e);
            ::_exit(127);
        }
        ::execvp(args[0], args.data());
        int e = errno;
        (void)!::write(exec_pipe[1], &e, sizeof e);
        ::_exit(127);
    }

    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    ::close(exec_pipe[1]);

    ProcessResult result;
    int exec_errno = 0;
    ssize_t got = ::read(exec_pipe[0], &exec_errno, sizeof exec_errno);
    ::close(exec_pipe[0]);

    int fd_in = in_pipe[1], fd_out = out_pipe[0], fd_err = err_pipe[0];
    if (got == static_cast<ssize_t>(sizeof exec_errno)) {
        result.not_found = true;
        result.err = std::strerror(exec_errno);
        close_fd(fd_in);
        close_fd(fd_out);
        close_fd(fd_err);
        int status = 0;
        ::waitpid(pid, &status, 0);
        result.exit_code = 127;
        return result;
    }

    // A child that exits before reading all input must not kill us with SIGPIPE.
    static std::once_flag sigpipe_once;
    std::call_once(sigpipe_once, [] { ::signal(SIGPIPE, SIG_IGN); });

    std::size_t written = 0;
    if (input.empty()) close_fd(fd_in);
    else ::fcntl(fd_in, F_SETFL, ::fcntl(fd_in, F_GETFL) | O_NONBLOCK);

    char buffer[65536];
    while (fd_out >= 0 || fd_err >= 0) {
        pollfd fds[3];
        int n = 0;
        int idx_in = -1, idx_out = -1, idx_err = -1;
        if (fd_in >= 0) fds[idx_in = n++] = {fd_in, POLLOUT, 0};
        if (fd_out >= 0) fds[idx_out = n++] = {fd_out, POLLIN, 0};
        if (fd_err >= 0) fds[idx_err = n++] = {fd_err, POLLIN, 0};
        if (::poll(fds, n, -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (idx_in >= 0 && fds[idx_in].revents) {
            if (fds[idx_in].revents & (POLLERR | POLLHUP)) {
                close_fd(fd_in);
            } else {
                ssize_t w = ::write(fd_in, input.data() + written, input.size() - written);
                if (w > 0) written += static_cast<std::size_t>(w);
                else if (w < 0 && errno != EAGAIN && errno != EINTR) close_fd(fd_in);
                if (written == input.size()) close_fd(fd_in);
            }
        }
        auto drain = [&](int idx, int& fd, std::string& sink) {
            if (idx < 0 || !fds[idx].revents) return;
            ssize_t r = ::read(fd, buffer, sizeof buffer);
            if (r > 0) sink.append(buffer, static_cast<std::size_t>(r));
            else if (r == 0 || (errno != EAGAIN && errno != EINTR)) close_fd(fd);
        };
        drain(idx_out, fd_out, result.out);
        drain(idx_err, fd_err, result.err);
    }
    close_fd(fd_in);

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return result;
}

} // namespace cdd::history
