void ip_cols(double *C, double *A, double *B,
  int sizel, int sizer, int sizeres, int np, int shr0, int rsize)
{
  int i, sigma, jp, kp;
  for (i = 0; i < sizel; i++) {
    for (sigma = 0; sigma < shr0; sigma++) {
      for (jp = 0; jp < (sizer/rsize); jp++) {
        for (kp = 0; kp < rsize; kp++) {
          C[((jp*rsize)+kp)+i*sizer] = C[((jp*rsize)+kp)+i*sizer] + A[(i*shr0)+sigma]*B[(sigma*sizer)+((jp*rsize)+kp)];
        }
      }
    }
  }
}
