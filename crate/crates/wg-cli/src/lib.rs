pub mod haar_mc;
